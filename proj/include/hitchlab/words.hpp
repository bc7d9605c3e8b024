#pragma once

// Words in the standard presentation of the genus-g surface group
//   < a_1, b_1, ..., a_g, b_g | [a_1,b_1] ... [a_g,b_g] >,
// Dehn reduction, conjugacy canonical forms and class enumeration.
//
// Letters are small integers: a_i = 4(i-1), a_i^-1 = 4(i-1)+1,
// b_i = 4(i-1)+2, b_i^-1 = 4(i-1)+3, so the numeric order is the global
// letter order a_1 < a_1^-1 < b_1 < b_1^-1 < a_2 < ... and x^-1 = x ^ 1.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hitchlab/linalg.hpp"

namespace hitchlab {

using Letter = std::uint8_t;
using Word = std::vector<Letter>;

constexpr Letter inverse(Letter x) { return static_cast<Letter>(x ^ 1u); }
constexpr int generator_of(Letter x) { return x >> 1; }
constexpr bool is_inverse_letter(Letter x) { return (x & 1u) != 0; }

Word inverse(const Word& w);

/// "a1b1A1B1" style; upper case is the inverse generator.
std::string to_string(const Word& w);
Word parse_word(const std::string& text);

/// [a_1,b_1]...[a_g,b_g] with [a,b] = a b a^-1 b^-1.
Word surface_relator(int genus);

/// Shortest word freely equal to w.
Word free_reduce(const Word& w);
/// Free reduction followed by stripping x ... x^-1 from the ends.
Word cyclic_reduce(const Word& w);
/// Lexicographically least rotation.
Word min_rotation(const Word& w);
/// True when w = u^k for some k >= 2.
bool is_proper_power(const Word& w);

/// The symmetrized relator of a one-relator surface group where every
/// letter occurs once in the relator, so relator pieces are chains of a
/// successor map.
class SurfaceGroup {
 public:
  explicit SurfaceGroup(int genus);

  int genus() const { return genus_; }
  int rank() const { return 2 * genus_; }
  int alphabet_size() const { return 4 * genus_; }
  std::size_t relator_length() const { return relator_.size(); }
  const Word& relator() const { return relator_; }

  /// Successor of x in the cyclic relator (chain 0) or its inverse (chain 1).
  Letter successor(int chain, Letter x) const { return succ_[chain][x]; }

  /// Dehn's algorithm on a linear word: replaces any subword that is more
  /// than half of a cyclic conjugate of the relator (or its inverse) by the
  /// shorter complement, freely reducing, until nothing applies.
  Word dehn_reduce(const Word& w) const;

  /// Same, treating w as a cyclic word; output is cyclically reduced.
  Word cyclic_dehn_reduce(const Word& w) const;

  /// Longest relator piece starting at position p of w read cyclically
  /// (cyclic = true) or linearly, along the given chain. Capped at |w| for
  /// cyclic words.
  std::size_t piece_length(const Word& w, std::size_t p, int chain, bool cyclic) const;

  /// Canonical representative of the conjugacy class: cyclic Dehn reduction,
  /// then the least rotation over the orbit of length-preserving half-relator
  /// swaps (restarting whenever a swap exposes a shortening). With
  /// unoriented = true the inverse class is merged in.
  Word canonical(const Word& w, bool unoriented = false) const;

 private:
  Word swap_half(const Word& w, std::size_t p, int chain) const;

  int genus_;
  Word relator_;
  std::vector<Letter> succ_[2];
};

/// Optional pruning by the translation length of a reference 2x2
/// representation (the Fuchsian seed). Prefixes whose base-point
/// displacement exceeds max_length + slack are pruned; a class is emitted
/// only if its translation length is <= max_length.
struct SeedCutoff {
  std::vector<Matrix> generators;  // 2x2, ordered a_1, b_1, a_2, b_2, ...
  double max_length = 0.0;
  double slack = 6.0;
};

struct EnumerationOptions {
  int genus = 2;
  int max_len = 1;
  bool unoriented = false;
  std::optional<SeedCutoff> seed;
  int workers = 1;
};

struct EnumeratedClass {
  Word canonical;
  /// Translation length under the seed representation (NaN without seed).
  double seed_length = 0.0;
};

/// One entry per conjugacy class with a representative of length <= max_len,
/// ordered by (length, letters). Deterministic for every worker count.
std::vector<EnumeratedClass> enumerate_classes(const EnumerationOptions& options);

std::size_t class_count(int genus, int max_len, bool unoriented = false);

/// 2 acosh(|tr|/2) of a 2x2 matrix, 0 for elliptic/parabolic traces.
double translation_length_2x2(const Matrix& m);

}  // namespace hitchlab
