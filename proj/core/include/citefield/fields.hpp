#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace citefield {

enum class SchemeKind : std::uint8_t { TopLevel, CsSubfield, NlpSubfield };

std::string_view to_string(SchemeKind kind);

/// Dense position of a label inside its scheme.
struct FieldId {
  std::uint8_t value = 0;

  constexpr auto operator<=>(const FieldId&) const = default;
};

/// Bitset over the labels of one scheme. Schemes are small (at most 64 labels).
class FieldSet {
 public:
  constexpr FieldSet() = default;
  constexpr explicit FieldSet(std::uint64_t bits) : bits_(bits) {}

  constexpr bool contains(FieldId id) const { return (bits_ >> id.value) & 1u; }
  constexpr void insert(FieldId id) { bits_ |= std::uint64_t{1} << id.value; }
  constexpr void erase(FieldId id) { bits_ &= ~(std::uint64_t{1} << id.value); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr std::uint64_t bits() const { return bits_; }

  constexpr FieldSet operator|(FieldSet o) const { return FieldSet{bits_ | o.bits_}; }
  constexpr FieldSet operator&(FieldSet o) const { return FieldSet{bits_ & o.bits_}; }
  constexpr bool operator==(const FieldSet&) const = default;

  /// Labels in ascending id order.
  std::vector<FieldId> ids() const;

  template <typename F>
  constexpr void for_each(F&& f) const {
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
      f(FieldId{static_cast<std::uint8_t>(std::countr_zero(b))});
    }
  }

 private:
  std::uint64_t bits_ = 0;
};

struct FieldInfo {
  std::string_view token;  // canonical lowercase identifier
  std::string_view name;   // display name
  std::vector<std::string_view> aliases;
};

/// A fixed taxonomy of field labels.
///
/// Three schemes exist: the 23 top-level fields of study, 16 CS subfields
/// (the 15 largest CSO subfields with AI split into ML and AI'), and 25 NLP
/// subfields (24 ARR areas plus shared tasks). Lookup accepts the token, the
/// display name or an alias, case-insensitively.
class FieldScheme {
 public:
  static const FieldScheme& top_level();
  static const FieldScheme& cs_subfields();
  static const FieldScheme& nlp_subfields();
  static const FieldScheme& get(SchemeKind kind);

  SchemeKind kind() const { return kind_; }
  std::string_view name() const { return to_string(kind_); }
  int size() const { return static_cast<int>(labels_.size()); }
  const FieldInfo& info(FieldId id) const { return labels_.at(id.value); }
  std::string_view display_name(FieldId id) const { return info(id).name; }
  std::string_view token(FieldId id) const { return info(id).token; }

  std::optional<FieldId> find(std::string_view label) const;
  FieldSet all() const;

 private:
  FieldScheme(SchemeKind kind, std::vector<FieldInfo> labels);

  SchemeKind kind_;
  std::vector<FieldInfo> labels_;
};

struct FieldLabel {
  SchemeKind scheme = SchemeKind::TopLevel;
  FieldId id;

  std::string_view name() const { return FieldScheme::get(scheme).display_name(id); }
  bool operator==(const FieldLabel&) const = default;
};

namespace fields {

/// Top-level id of "Computer Science".
FieldId computer_science();
FieldId linguistics();

/// Top-level field set {Computer Science}.
FieldSet cs_only();
/// Top-level fields other than Computer Science.
FieldSet non_cs();

}  // namespace fields

}  // namespace citefield
