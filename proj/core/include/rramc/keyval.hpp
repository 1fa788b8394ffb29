#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rramc::keyval {

// Flat "key = value" document. Lines starting with '#' and blank lines are
// ignored; keys are dotted lowercase identifiers; duplicate keys keep the
// last value. Insertion order is preserved for deterministic re-emission.
class Document {
public:
  void set(std::string key, std::string value);

  bool has(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;
  double get_double(std::string_view key) const;                  // throws ConfigError
  double get_double(std::string_view key, double fallback) const;
  unsigned long get_uint(std::string_view key) const;             // throws ConfigError
  unsigned long get_uint(std::string_view key, unsigned long fallback) const;
  std::string get_string(std::string_view key, std::string fallback) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  // Overlays other on top of this document (other wins on conflicts).
  void merge_from(const Document& other);

  std::string serialize() const;

private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

Document parse(std::string_view text);        // throws ConfigError with line info
Document load_file(const std::string& path);  // throws IoFailure / ConfigError
void save_file(const Document& doc, const std::string& path);

}  // namespace rramc::keyval
