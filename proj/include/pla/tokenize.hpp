#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pla {

// One process event as recorded by the MES: position in the route, wall-clock
// timestamp (hours since a common epoch) and the high-level attribute values
// (equipment id, recipe id, ...) used to synthesize the process token.
struct ProcessRecord {
  std::string wafer_id;
  std::size_t step_index = 0;  // 1-based, contiguous within a wafer
  double timestamp_h = 0.0;
  std::vector<std::pair<std::string, std::string>> attributes;

  const std::string* find_attribute(const std::string& name) const;
};

struct Token {
  std::string text;

  bool operator==(const Token& o) const { return text == o.text; }
};

// Dense token dictionary in first-appearance order. Ids are stable given
// identical input order.
class Vocabulary {
 public:
  std::size_t add(const Token& t);  // returns id, inserting if new
  const Token& token(std::size_t id) const { return tokens_[id]; }
  const std::vector<Token>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }

  // id lookup; -1 if absent
  long long find(const std::string& text) const;

 private:
  std::vector<Token> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Joins the listed attribute values with `separator`, sanitizing in-value
// separator occurrences to '_' so the token splits back into fields.
// Throws Error("MissingAttribute") if the record lacks a listed attribute.
Token make_token(const ProcessRecord& record,
                 const std::vector<std::string>& attribute_order,
                 char separator);

Vocabulary build_vocabulary(const std::vector<ProcessRecord>& records,
                            const std::vector<std::string>& attribute_order,
                            char separator);

}  // namespace pla
