#include "bx/config.hpp"

#include <fstream>
#include <sstream>

namespace bx {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

long parseLong(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    long n = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return n;
  } catch (const std::exception&) {
    throw ConfigError("expected an integer for " + key + ", got '" + value + "'");
  }
}

double parseDouble(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    double d = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("expected a number for " + key + ", got '" + value + "'");
  }
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
  if (key == "weights.var") {
    weights.var = parseLong(key, value);
  } else if (key == "weights.con") {
    weights.con = parseLong(key, value);
  } else if (key == "weights.lambda") {
    weights.lambda = parseLong(key, value);
  } else if (key == "weights.app") {
    weights.app = parseLong(key, value);
  } else if (key == "weights.case") {
    weights.caseExpr = parseLong(key, value);
  } else if (key == "weights.branch") {
    weights.branch = parseLong(key, value);
  } else if (key == "weights.component") {
    weights.component = parseLong(key, value);
  } else if (key == "weights.bool") {
    weights.boolConst = parseLong(key, value);
  } else if (key == "weights.lift") {
    weights.lift = parseLong(key, value);
  } else if (key == "weights.bx") {
    weights.bxWrap = parseLong(key, value);
  } else if (key == "budget.cost") {
    budgetCost = parseLong(key, value);
  } else if (key == "budget.seconds") {
    budgetSeconds = parseDouble(key, value);
  } else if (key == "enum.case_depth") {
    caseDepth = static_cast<int>(parseLong(key, value));
  } else if (key == "enum.max_atoms") {
    maxAtoms = static_cast<int>(parseLong(key, value));
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
  if (key.rfind("weights.", 0) == 0 && parseLong(key, value) < 0) {
    throw ConfigError("weight must be >= 0: " + key);
  }
}

Config Config::fromText(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineNo) + ": expected key = value");
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

Config Config::fromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return fromText(buf.str());
}

std::string Config::show() const {
  std::ostringstream out;
  out << "weights.var = " << weights.var << "\n"
      << "weights.con = " << weights.con << "\n"
      << "weights.lambda = " << weights.lambda << "\n"
      << "weights.app = " << weights.app << "\n"
      << "weights.case = " << weights.caseExpr << "\n"
      << "weights.branch = " << weights.branch << "\n"
      << "weights.component = " << weights.component << "\n"
      << "weights.bool = " << weights.boolConst << "\n"
      << "weights.lift = " << weights.lift << "\n"
      << "weights.bx = " << weights.bxWrap << "\n"
      << "budget.cost = " << budgetCost << "\n"
      << "budget.seconds = " << budgetSeconds << "\n"
      << "enum.case_depth = " << caseDepth << "\n"
      << "enum.max_atoms = " << maxAtoms << "\n";
  return out.str();
}

}  // namespace bx
