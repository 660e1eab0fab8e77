#include "params.hpp"

#include <cctype>
#include <cstdlib>

namespace gd::cli {

Params::Params(std::shared_ptr<const toml::table> root, const toml::table* t, std::string where)
    : state_(std::make_shared<State>()) {
  state_->root = std::move(root);
  state_->table = t;
  state_->where = std::move(where);
}

Params Params::owning(toml::table t, std::string where) {
  auto root = std::make_shared<const toml::table>(std::move(t));
  const toml::table* p = root.get();
  return Params(std::move(root), p, std::move(where));
}

bool Params::has(std::string_view key) const { return state_->table->contains(key); }

const toml::node* Params::get(std::string_view key) const {
  const toml::node* n = state_->table->get(key);
  if (n) state_->used.emplace(key);
  return n;
}

const toml::node& Params::need(std::string_view key) const {
  const toml::node* n = get(key);
  if (!n) fail(key, "is required");
  return *n;
}

void Params::fail(std::string_view key, const std::string& what) const {
  throw ConfigError(state_->where + "." + std::string(key) + " " + what);
}

double Params::num(std::string_view key) const {
  const auto v = need(key).value<double>();
  if (!v) fail(key, "must be a number");
  return *v;
}

double Params::num(std::string_view key, double fallback) const { return has(key) ? num(key) : fallback; }

std::optional<double> Params::maybe_num(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return num(key);
}

int Params::integer(std::string_view key) const {
  const auto v = need(key).value<int64_t>();
  if (!v) fail(key, "must be an integer");
  return static_cast<int>(*v);
}

int Params::integer(std::string_view key, int fallback) const { return has(key) ? integer(key) : fallback; }

std::string Params::str(std::string_view key) const {
  const auto v = need(key).value<std::string>();
  if (!v) fail(key, "must be a string");
  return *v;
}

std::string Params::str(std::string_view key, const std::string& fallback) const {
  return has(key) ? str(key) : fallback;
}

bool Params::flag(std::string_view key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto v = need(key).value<bool>();
  if (!v) fail(key, "must be true or false");
  return *v;
}

std::vector<double> Params::nums(std::string_view key) const {
  const toml::node& n = need(key);
  std::vector<double> out;
  if (const auto* arr = n.as_array()) {
    for (const auto& e : *arr) {
      const auto v = e.value<double>();
      if (!v) fail(key, "must contain only numbers");
      out.push_back(*v);
    }
    return out;
  }
  const auto v = n.value<double>();
  if (!v) fail(key, "must be a number or an array of numbers");
  return {*v};
}

std::vector<double> Params::nums(std::string_view key, std::vector<double> fallback) const {
  return has(key) ? nums(key) : fallback;
}

Params Params::child(const toml::table* t, std::string where) const {
  auto s = std::make_shared<State>();
  s->root = state_->root;
  s->table = t;
  s->where = std::move(where);
  state_->children.push_back(s);
  return Params(s);
}

Params Params::sub(std::string_view key) const {
  const toml::node& n = need(key);
  const auto* t = n.as_table();
  if (!t) fail(key, "must be a table");
  return child(t, state_->where + "." + std::string(key));
}

std::vector<Params> Params::list(std::string_view key) const {
  const toml::node& n = need(key);
  std::vector<Params> out;
  if (const auto* t = n.as_table()) {
    out.push_back(child(t, state_->where + "." + std::string(key)));
    return out;
  }
  const auto* arr = n.as_array();
  if (!arr) fail(key, "must be a table or an array of tables");
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const auto* t = (*arr)[i].as_table();
    if (!t) fail(key, "must contain only tables");
    out.push_back(child(t, state_->where + "." + std::string(key) + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void Params::finish() const {
  for (const auto& [k, v] : *state_->table) {
    if (!state_->used.count(k.str())) fail(k.str(), "is not a recognised key");
  }
  for (const auto& c : state_->children) Params(c).finish();
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

bool parse_number(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return !s.empty() && end == s.c_str() + s.size();
}

void insert_value(toml::table& t, const std::string& key, const std::string& raw) {
  double d = 0.0;
  if (raw.size() >= 2 && raw.front() == '[' && raw.back() == ']') {
    toml::array arr;
    std::string body = raw.substr(1, raw.size() - 2);
    std::size_t pos = 0;
    while (pos <= body.size()) {
      const auto next = body.find(',', pos);
      const std::string item = trim(body.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
      if (!item.empty()) {
        if (!parse_number(item, d)) throw ConfigError("'" + item + "' in '" + key + "' is not a number");
        arr.push_back(d);
      }
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    t.insert_or_assign(key, std::move(arr));
  } else if (raw == "true" || raw == "false") {
    t.insert_or_assign(key, raw == "true");
  } else if (parse_number(raw, d)) {
    t.insert_or_assign(key, d);
  } else {
    t.insert_or_assign(key, raw);
  }
}

}  // namespace

toml::table parse_registry(const std::string& spec) {
  const std::string s = trim(spec);
  const auto open = s.find('{');
  toml::table t;
  if (open == std::string::npos) {
    if (s.empty()) throw ConfigError("empty registry name");
    t.insert("name", s);
    return t;
  }
  if (s.back() != '}') throw ConfigError("'" + spec + "' must end with '}'");
  t.insert("name", trim(s.substr(0, open)));
  const std::string body = s.substr(open + 1, s.size() - open - 2);
  int depth = 0;
  std::string item;
  auto flush = [&] {
    const std::string kv = trim(item);
    item.clear();
    if (kv.empty()) return;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("'" + kv + "' in '" + spec + "' is not key=value");
    insert_value(t, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  };
  for (char c : body) {
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == ',' && depth == 0) {
      flush();
    } else {
      item += c;
    }
  }
  flush();
  return t;
}

}  // namespace gd::cli
