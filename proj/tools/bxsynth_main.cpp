int main() { return 1; }  // replaced when the CLI module lands
