// The search engine is header-only (templates); this translation unit only
// verifies the header compiles standalone.
#include "bx/search.hpp"

namespace bx {}
