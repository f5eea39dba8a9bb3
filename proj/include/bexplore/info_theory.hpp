#pragma once

#include <map>
#include <string>
#include <vector>

#include "bexplore/instance.hpp"
#include "bexplore/rational.hpp"

namespace bexplore {

// Exact joint distribution over a tuple of named finite-support variables.
// Probabilities stay rational throughout; logarithms enter only when a
// numeric entropy/information value is reported. Every independence or
// zero decision is made on the rational side.
class FiniteJoint {
 public:
  FiniteJoint(std::vector<std::string> names,
              std::vector<std::vector<std::string>> supports);

  void add_mass(const std::vector<int>& outcome, const Rat& p);
  void validate() const;  // sums to 1, all masses >= 0

  int num_vars() const { return static_cast<int>(names_.size()); }
  int var_index(const std::string& name) const;
  const std::vector<std::string>& support(int var) const {
    return supports_[var];
  }
  const std::map<std::vector<int>, Rat>& mass() const { return mass_; }

  // Exact marginal over the listed variables (canonical outcome order).
  std::map<std::vector<int>, Rat> marginal(const std::vector<int>& vars) const;

  bool operator==(const FiniteJoint&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> supports_;
  std::map<std::vector<int>, Rat> mass_;
};

// Base-2 entropy of the marginal over `vars`; exactly 0.0 for point masses.
double entropy(const FiniteJoint& j, const std::vector<int>& vars);

struct CmiResult {
  double value = 0;         // I(X;Y|Z) >= 0
  bool exact_zero = false;  // conditional-independence factorization holds
};

// I(X;Y|Z) with an exact rational certificate for the zero case. The
// certificate, never the float, drives lemma-level decisions.
CmiResult conditional_mutual_information(const FiniteJoint& j,
                                         const std::vector<int>& x,
                                         const std::vector<int>& y,
                                         const std::vector<int>& z);

// KL divergence in bits between aligned distributions. Support violations
// return +infinity; p == q returns exactly 0.0 (decided on rationals).
double kl_divergence(const std::vector<Rat>& p, const std::vector<Rat>& q);

struct InequalityCheck {
  bool holds = false;
  double lhs = 0;
  double rhs = 0;
  double slack = 0;  // rhs - lhs
};

InequalityCheck pinsker_check(const std::vector<Rat>& p,
                              const std::vector<Rat>& q);

// Fano: H(X|Y) <= H(E) + Pr[E] * log2(|X|-1), E = {Xhat != X}. Requires
// Xhat to be a deterministic function of Y (checked exactly).
InequalityCheck fano_check(const FiniteJoint& j, int x, int y, int xhat);

enum class Mode;  // explore.hpp

struct PolicyHistorySpec {
  Mode mode;
  Rat delta = 0;    // engine-side slack (private)
  int rounds = 1;   // l; the joint covers rounds 1..l-1 plus the phase signal
  std::size_t cap = 200000;
};

// Exact joint of (state, round histories of a greedy single-round BIC
// reference policy, engine phase-l signal). The object on which the
// lemma-level identities I(S';omega|S_l) = 0 (public) and <= delta^2/8
// (private) are asserted.
FiniteJoint policy_history_joint(const Instance& inst,
                                 const PolicyHistorySpec& spec);

}  // namespace bexplore
