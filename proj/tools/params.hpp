#pragma once

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <toml.hpp>

namespace gd::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Typed read access to a TOML table. Every key that is read is recorded so
/// that finish() can reject keys nobody asked for.
class Params {
 public:
  Params(std::shared_ptr<const toml::table> root, const toml::table* t, std::string where);
  static Params owning(toml::table t, std::string where);

  const std::string& where() const { return state_->where; }
  bool has(std::string_view key) const;

  double num(std::string_view key) const;
  double num(std::string_view key, double fallback) const;
  int integer(std::string_view key) const;
  int integer(std::string_view key, int fallback) const;
  std::string str(std::string_view key) const;
  std::string str(std::string_view key, const std::string& fallback) const;
  bool flag(std::string_view key, bool fallback) const;
  std::vector<double> nums(std::string_view key) const;
  std::vector<double> nums(std::string_view key, std::vector<double> fallback) const;
  std::optional<double> maybe_num(std::string_view key) const;

  Params sub(std::string_view key) const;
  std::vector<Params> list(std::string_view key) const;

  /// Throws ConfigError naming the first unread key, recursively.
  void finish() const;

 private:
  struct State {
    std::shared_ptr<const toml::table> root;
    const toml::table* table = nullptr;
    std::string where;
    mutable std::set<std::string, std::less<>> used;
    mutable std::vector<std::shared_ptr<State>> children;
  };
  explicit Params(std::shared_ptr<State> s) : state_(std::move(s)) {}
  const toml::node* get(std::string_view key) const;
  const toml::node& need(std::string_view key) const;
  [[noreturn]] void fail(std::string_view key, const std::string& what) const;
  Params child(const toml::table* t, std::string where) const;

  std::shared_ptr<State> state_;
};

/// Parses `name{k=v, k=v}` into a table {name = "...", k = v}. Values are
/// numbers, booleans, bare words or [a, b] arrays of numbers.
toml::table parse_registry(const std::string& spec);

}  // namespace gd::cli
