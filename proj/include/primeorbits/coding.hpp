#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "primeorbits/map.hpp"

namespace primeorbits {

/// Admissible symbol string I = (i_r, ..., i_1). symbols[0] is the outermost
/// branch, i.e. the piece that contains g_I(z); symbols.back() is applied
/// first. The point g_I(z) therefore has itinerary symbols[0], symbols[1], ...
struct SymbolWord {
  std::vector<int> symbols;

  std::size_t length() const { return symbols.size(); }
  bool operator==(const SymbolWord&) const = default;
};

/// Word of length n whose symbols are the base-d digits of index, most
/// significant first.
SymbolWord word_from_index(std::uint64_t index, int n, int alphabet);

enum class CodingKind { FullShift, UserMarkov };

/// Symbolic coding of J by inverse branches. For the full shift the pieces
/// are the d components of f^{-1}(base disk), represented by their centres;
/// for user Markov codings they are the supplied point clouds.
class CodingScheme {
 public:
  struct FullShiftData {
    cplx center;
    double radius;
    std::vector<cplx> component_centers;
    std::vector<std::vector<cplx>> component_boundaries;
  };

  static CodingScheme full_shift(FullShiftData data, double contraction);
  /// Validates that the matrix is 0/1 and mixing and that every piece is
  /// non-empty. anchors default to the cloud point closest to the cloud mean.
  static CodingScheme user_markov(const RationalMap& map, std::vector<std::vector<int>> transition,
                                  std::vector<std::vector<cplx>> pieces,
                                  std::vector<cplx> anchors = {},
                                  std::optional<double> neighborhood = std::nullopt);
  /// {"transition": [[0/1,...],...], "pieces": [[[re,im],...],...],
  ///  "anchors": [[re,im],...], "neighborhood": r}; the last two optional.
  static CodingScheme user_markov_from_json(const RationalMap& map, const std::string& text);

  CodingKind kind() const { return kind_; }
  int alphabet_size() const { return static_cast<int>(pieces_.size()); }
  bool transition(int i, int j) const { return matrix_[i][j] != 0; }
  const std::vector<std::vector<int>>& transition_matrix() const { return matrix_; }
  double contraction() const { return contraction_; }
  const std::vector<cplx>& piece(int i) const { return pieces_[i]; }
  const std::optional<FullShiftData>& full_shift_data() const { return full_; }

  /// Targets are the sets U_j the branches act on: the base disk alone for
  /// the full shift, one per piece for user codings.
  int target_count() const { return kind_ == CodingKind::FullShift ? 1 : alphabet_size(); }
  cplx anchor(int target) const { return anchors_[target]; }
  /// Target containing z (always 0 for the full shift).
  int target_of(cplx z) const;
  /// Symbol i may be applied to a point of target j.
  bool branch_allowed(int symbol, int target) const;

  double distance_to_piece(int i, cplx z) const;
  int nearest_piece(cplx z) const;
  bool in_base_region(cplx z) const;

  /// Checks internal transitions and, when start_target >= 0, that the
  /// innermost symbol may act on that target. Cyclic words also need
  /// M[symbols.back()][symbols.front()].
  bool admissible(const SymbolWord& word, int start_target = -1, bool cyclic = false) const;

  /// All admissible periodic words of length n, ordered by index.
  std::vector<SymbolWord> periodic_words(int n) const;

  std::string describe() const;

 private:
  CodingKind kind_ = CodingKind::FullShift;
  std::vector<std::vector<int>> matrix_;
  std::vector<std::vector<cplx>> pieces_;
  std::vector<cplx> anchors_;
  double neighborhood_ = 0.0;
  double contraction_ = 1.0;
  std::optional<FullShiftData> full_;
};

/// All d solutions of f(w) = z. Throws CriticalValueCollision when z is a
/// critical value or two preimages merge.
std::vector<cplx> preimages(const RationalMap& map, cplx z, double merge_tol = 1e-9);

/// g_{symbol}(z): the preimage of z lying in piece `symbol`. Throws
/// BranchAmbiguity when the best and second-best candidates are closer than
/// 10 * tol.
cplx branch_preimage(const RationalMap& map, const CodingScheme& scheme, int symbol, cplx z,
                     double tol = 1e-9);

/// g_I(z) for an admissible word.
cplx backward_point(const RationalMap& map, const CodingScheme& scheme, const SymbolWord& word,
                    cplx z, double tol = 1e-9);

/// Cantor-case coding for a hyperbolic polynomial whose critical orbits all
/// escape. Throws NotCantor otherwise.
CodingScheme detect_full_shift(const RationalMap& map);

/// User coding shipped with a built-in map (only z2, the circle case).
std::optional<CodingScheme> builtin_coding(const std::string& name, const RationalMap& map);

}  // namespace primeorbits
