#include "pybmc/types.hpp"

namespace pybmc {

VerifierType VerifierType::integer(unsigned width, bool is_signed) {
  VerifierType t(Kind::Int);
  t.width_ = width;
  t.signed_ = is_signed;
  return t;
}

VerifierType VerifierType::list_of(VerifierType element, std::size_t length) {
  VerifierType t(Kind::List);
  t.element_ = std::make_shared<const VerifierType>(std::move(element));
  t.length_ = length;
  return t;
}

VerifierType VerifierType::class_ref(std::string qualified_name) {
  VerifierType t(Kind::Class);
  t.class_name_ = std::move(qualified_name);
  return t;
}

VerifierType VerifierType::function(std::vector<VerifierType> params, VerifierType result) {
  VerifierType t(Kind::Function);
  t.params_ = std::move(params);
  t.result_ = std::make_shared<const VerifierType>(std::move(result));
  return t;
}

bool VerifierType::operator==(const VerifierType& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case Kind::None:
    case Kind::Bool:
    case Kind::Float:
      return true;
    case Kind::Int:
      return width_ == other.width_ && signed_ == other.signed_;
    case Kind::List:
      return length_ == other.length_ && *element_ == *other.element_;
    case Kind::Class:
      return class_name_ == other.class_name_;
    case Kind::Function:
      return params_ == other.params_ && *result_ == *other.result_;
  }
  return false;
}

std::string short_name(const std::string& qualified) {
  auto at = qualified.rfind('@');
  return at == std::string::npos ? qualified : qualified.substr(at + 1);
}

std::string VerifierType::to_string(unsigned default_int_width) const {
  switch (kind_) {
    case Kind::None: return "None";
    case Kind::Bool: return "bool";
    case Kind::Float: return "float";
    case Kind::Int:
      if (signed_ && width_ == default_int_width) return "int";
      return std::string(signed_ ? "int" : "uint") + std::to_string(width_);
    case Kind::List: return "list[" + element_->to_string(default_int_width) + "]";
    case Kind::Class: return short_name(class_name_);
    case Kind::Function: {
      std::string out = "(";
      for (std::size_t i = 0; i < params_.size(); ++i) {
        if (i) out += ", ";
        out += params_[i].to_string(default_int_width);
      }
      return out + ") -> " + result_->to_string(default_int_width);
    }
  }
  return "?";
}

bool is_valid_int_width(unsigned width) {
  return width == 32 || width == 64 || width == 128 || width == 256;
}

std::optional<VerifierType> builtin_type_named(const std::string& name, unsigned default_int_width) {
  if (name == "int") return VerifierType::integer(default_int_width, true);
  if (name == "float") return VerifierType::floating();
  if (name == "bool") return VerifierType::boolean();
  if (name == "None") return VerifierType::none();
  for (unsigned w : {32u, 64u, 128u, 256u}) {
    if (name == "int" + std::to_string(w)) return VerifierType::integer(w, true);
    if (name == "uint" + std::to_string(w)) return VerifierType::integer(w, false);
  }
  return std::nullopt;
}

}  // namespace pybmc
