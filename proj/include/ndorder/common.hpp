#ifndef NDORDER_COMMON_HPP_
#define NDORDER_COMMON_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace ndorder {

/// Signed integer type used for vertex indices, weights and counts.
using Gnum = std::int64_t;

/// Random stream handed to every logical process and every sequential routine.
using Rng = std::mt19937_64;

/// Malformed user input: bad files, bad permutations, bad parameters.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural invariant of the library was violated.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void check_invariant(bool condition, const std::string& what) {
  if (!condition) {
    throw InvariantError(what);
  }
}

// splitmix64 finalizer, used to derive independent seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t value) {
  return mix_seed(seed ^ mix_seed(value + 0x632be59bd9b4e019ULL));
}

/// Uniform integer in [0, bound).
inline Gnum random_below(Rng& rng, Gnum bound) {
  return static_cast<Gnum>(rng() % static_cast<std::uint64_t>(bound));
}

/// Tunables of the whole ordering pipeline.
struct Strategy {
  // Nested dissection.
  Gnum nd_cutoff = 120;

  // Coarsening.
  Gnum fold_min = 100;
  Gnum coarsest_size = 120;
  int match_passes = 8;
  double match_stop_fraction = 0.02;
  double ratio_max = 0.8;
  bool match_shuffle = true;

  // Separator computation and refinement. band_width <= 0 refines whole graphs.
  int band_width = 3;
  double balance_tol = 0.2;
  int fm_backtrack = 40;
  int fm_pass_max = 10;
  int perturb_moves = 4;
  Gnum band_max = 100000;
  int tries = 4;
  int separator_tries = 1;

  std::string describe() const {
    return "nd-cutoff=" + std::to_string(nd_cutoff) + " fold-min=" + std::to_string(fold_min) +
           " coarsest-size=" + std::to_string(coarsest_size) +
           " match-passes=" + std::to_string(match_passes) + " ratio-max=" + std::to_string(ratio_max) +
           " band-width=" + std::to_string(band_width) + " balance-tol=" + std::to_string(balance_tol) +
           " fm-passes=" + std::to_string(fm_pass_max) + " tries=" + std::to_string(tries) +
           " separator-tries=" + std::to_string(separator_tries);
  }
};

}  // namespace ndorder

#endif  // NDORDER_COMMON_HPP_
