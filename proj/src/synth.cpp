namespace bx {}  // implementation added with its module
