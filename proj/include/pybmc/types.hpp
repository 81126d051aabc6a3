#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pybmc/ast.hpp"

namespace pybmc {

// Static types of the verified subset.
class VerifierType {
 public:
  enum class Kind { None, Bool, Int, Float, List, Class, Function };

  VerifierType() : kind_(Kind::None) {}

  static VerifierType none() { return VerifierType(Kind::None); }
  static VerifierType boolean() { return VerifierType(Kind::Bool); }
  static VerifierType integer(unsigned width, bool is_signed);
  static VerifierType floating() { return VerifierType(Kind::Float); }
  static VerifierType list_of(VerifierType element, std::size_t length);
  static VerifierType class_ref(std::string qualified_name);
  static VerifierType function(std::vector<VerifierType> params, VerifierType result);

  Kind kind() const { return kind_; }
  bool is(Kind k) const { return kind_ == k; }
  bool is_scalar() const { return kind_ == Kind::Bool || kind_ == Kind::Int || kind_ == Kind::Float; }
  bool is_aggregate() const { return kind_ == Kind::List || kind_ == Kind::Class; }
  bool is_numeric() const { return kind_ == Kind::Int || kind_ == Kind::Float; }

  unsigned width() const { return width_; }
  bool is_signed() const { return signed_; }
  const VerifierType& element() const { return *element_; }
  std::size_t length() const { return length_; }
  const std::string& class_name() const { return class_name_; }
  const std::vector<VerifierType>& params() const { return params_; }
  const VerifierType& result() const { return *result_; }

  // Source-level spelling: int, int64, uint256, float, bool, list[int],
  // the class's short name, ...
  std::string to_string(unsigned default_int_width = 32) const;

  bool operator==(const VerifierType& other) const;
  bool operator!=(const VerifierType& other) const { return !(*this == other); }

 private:
  explicit VerifierType(Kind kind) : kind_(kind) {}

  Kind kind_;
  unsigned width_ = 0;
  bool signed_ = true;
  std::shared_ptr<const VerifierType> element_;
  std::size_t length_ = 0;
  std::string class_name_;
  std::vector<VerifierType> params_;
  std::shared_ptr<const VerifierType> result_;
};

bool is_valid_int_width(unsigned width);

// Names of the fixed-width integer types (`int64`, `uint256`, ...). `int`
// itself maps to the configured default width.
std::optional<VerifierType> builtin_type_named(const std::string& name, unsigned default_int_width);

// Last component of a qualified name ("main@Point" -> "Point").
std::string short_name(const std::string& qualified);

}  // namespace pybmc
