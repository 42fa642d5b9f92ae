#include "pla/tokenize.hpp"

#include "pla/error.hpp"

namespace pla {

const std::string* ProcessRecord::find_attribute(const std::string& name) const {
  for (const auto& [key, value] : attributes) {
    if (key == name) return &value;
  }
  return nullptr;
}

std::size_t Vocabulary::add(const Token& t) {
  auto it = index_.find(t.text);
  if (it != index_.end()) return it->second;
  const std::size_t id = tokens_.size();
  tokens_.push_back(t);
  index_.emplace(t.text, id);
  return id;
}

long long Vocabulary::find(const std::string& text) const {
  auto it = index_.find(text);
  return it == index_.end() ? -1 : static_cast<long long>(it->second);
}

Token make_token(const ProcessRecord& record,
                 const std::vector<std::string>& attribute_order,
                 char separator) {
  if (attribute_order.empty())
    raise("InvalidConfig", "attribute_order must not be empty");
  std::string text;
  bool first = true;
  for (const auto& name : attribute_order) {
    const std::string* value = record.find_attribute(name);
    if (value == nullptr)
      raise("MissingAttribute", "record " + record.wafer_id + " step " +
                                    std::to_string(record.step_index) +
                                    " lacks attribute '" + name + "'");
    if (!first) text.push_back(separator);
    first = false;
    for (char c : *value) text.push_back(c == separator ? '_' : c);
  }
  return Token{std::move(text)};
}

Vocabulary build_vocabulary(const std::vector<ProcessRecord>& records,
                            const std::vector<std::string>& attribute_order,
                            char separator) {
  if (records.empty()) raise("InvalidConfig", "no records to build a vocabulary from");
  Vocabulary vocab;
  for (const auto& rec : records) vocab.add(make_token(rec, attribute_order, separator));
  return vocab;
}

}  // namespace pla
