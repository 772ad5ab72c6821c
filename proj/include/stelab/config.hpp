#pragma once
#include <map>
#include <string>
#include <vector>

namespace stelab {

// flat key = value configuration ('#' comments). Resolution order (weakest
// first): file/text values, STELAB_<KEY> environment variables (dots become
// underscores, upper-cased), programmatic overrides (CLI flags).
class Config {
 public:
  static Config parse_text(const std::string& text);
  static Config parse_file(const std::string& path);

  void apply_env();                                   // STELAB_* overrides
  void set(const std::string& key, const std::string& value);  // strongest

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;                       // throws if absent
  std::string get(const std::string& key, const std::string& dflt) const;
  double get_real(const std::string& key, double dflt) const;
  long long get_int(const std::string& key, long long dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
  std::vector<double> get_reals(const std::string& key) const;  // comma-separated

  const std::map<std::string, std::string>& items() const { return kv_; }
  std::string to_text() const;

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace stelab
