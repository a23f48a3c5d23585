#pragma once

#include <string>
#include <vector>

#include "mqm/errors.hpp"

namespace mqm {

// Presentation of the deck group: generator names plus relation words.
// Words are lists of signed 1-based generator indices: +1 = a, -1 = a^-1,
// +2 = b, -2 = b^-1.
using Word = std::vector<int>;

struct Pi1Presentation {
  std::vector<std::string> generators;
  std::vector<Word> relations;
  bool abelian = true;

  int n_generators() const { return static_cast<int>(generators.size()); }
};

// The four group shapes realized by the built-in manifolds.
enum class PresKind { Trivial, FreeZ, Z2, KleinGroup };

PresKind pres_kind(const Pi1Presentation& p);

// Element in canonical form. Abelian kinds store per-generator exponents;
// the Klein group stores the normal form a^m b^n (using b a = a^-1 b).
struct HomotopyClass {
  PresKind kind = PresKind::Trivial;
  long long m = 0;  // exponent of a
  long long n = 0;  // exponent of b

  static HomotopyClass identity(PresKind k) { return HomotopyClass{k, 0, 0}; }
  static HomotopyClass generator(PresKind k, int index, int sign);

  bool is_identity() const { return m == 0 && n == 0; }
  // Concatenation in traversal order: *this followed by other.
  HomotopyClass compose(const HomotopyClass& other) const;
  HomotopyClass inverse() const;
  HomotopyClass power(long long e) const;

  bool operator==(const HomotopyClass& o) const {
    return kind == o.kind && m == o.m && n == o.n;
  }
  bool operator!=(const HomotopyClass& o) const { return !(*this == o); }

  std::string str() const;
};

// Fold a letter word into canonical form. Validates generator indices.
HomotopyClass reduce(const Pi1Presentation& p, const Word& word);

// Parse words like "a^2 b^-1", "a b a^-1", or "e" (identity).
Word word_from_string(const Pi1Presentation& p, const std::string& text);

}  // namespace mqm
