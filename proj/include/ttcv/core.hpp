#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ttcv/rational.hpp"

namespace ttcv {

// Agents and objects are 0-based ints throughout the library; the io layer
// translates to the 1-based labels used by the JSON documents. Endowments are
// canonical: agent i owns object i. Instances have n >= 2 agents.

// Strict total order over the n objects, most preferred first.
class Preference {
 public:
  // ranking[k] = the object in (0-based) position k. Must be a permutation of
  // 0..n-1 with n >= 2; throws std::invalid_argument otherwise.
  explicit Preference(std::vector<int> ranking);

  int n() const { return static_cast<int>(ranking_.size()); }
  int object_at(int position) const { return ranking_.at(position); }
  int top() const { return ranking_.front(); }
  // 1-based: rank(top()) == 1. Equals |upper_contour(object)|.
  int rank(int object) const { return position_of(object) + 1; }
  int position_of(int object) const;
  bool strictly_prefers(int x, int y) const { return position_of(x) < position_of(y); }
  bool weakly_prefers(int x, int y) const { return position_of(x) <= position_of(y); }
  // Objects weakly preferred to `object`, in preference order ending with it.
  std::vector<int> upper_contour(int object) const;
  const std::vector<int>& ranking() const { return ranking_; }

  // Lexicographic position of ranking() among all n! rankings, 0-based.
  long long index() const;
  static Preference from_index(int n, long long lex_index);
  static long long count(int n);  // n!

  bool operator==(const Preference& o) const { return ranking_ == o.ranking_; }

 private:
  std::vector<int> ranking_;
  std::vector<int> position_;  // position_[object] = rank(object) - 1
};

// One preference per agent, all over the same n objects.
class Profile {
 public:
  explicit Profile(std::vector<Preference> prefs);

  int n() const { return static_cast<int>(prefs_.size()); }
  const Preference& pref(int agent) const { return prefs_.at(agent); }
  Profile with_pref(int agent, Preference p) const;

  // Lexicographic position among all (n!)^n profiles: agent 0's preference is
  // the most significant digit, base n!.
  long long index() const;
  static Profile from_index(int n, long long profile_index);
  static long long space_size(int n);  // (n!)^n; throws for n > 6 (overflow)

  bool operator==(const Profile& o) const { return prefs_ == o.prefs_; }

 private:
  std::vector<Preference> prefs_;
};

using Lottery = std::vector<Rational>;

// Nonnegative entries summing to exactly 1.
bool is_lottery(const Lottery& lottery);

// Bistochastic n x n matrix: entry (i, x) is agent i's probability of
// receiving object x. Construction validates exactly; no epsilon anywhere.
class AssignmentMatrix {
 public:
  // Row-major entries. Throws std::invalid_argument when n < 2, the size is
  // not n*n, an entry is outside [0, 1], or a row/column sum differs from 1.
  AssignmentMatrix(int n, std::vector<Rational> row_major);

  static AssignmentMatrix identity(int n);
  // agent_to_object must be a permutation of 0..n-1.
  static AssignmentMatrix from_permutation(const std::vector<int>& agent_to_object);

  int n() const { return n_; }
  const Rational& at(int agent, int object) const;
  Lottery row(int agent) const;
  Rational row_mass(int agent, std::span<const int> objects) const;
  bool is_deterministic() const;
  // The permutation when every row is degenerate; nullopt otherwise.
  std::optional<std::vector<int>> as_permutation() const;

  bool operator==(const AssignmentMatrix& o) const {
    return n_ == o.n_ && entries_ == o.entries_;
  }

 private:
  int n_;
  std::vector<Rational> entries_;
};

// Bijection between agents and the objects they own. The library computes in
// the canonical labeling (agent i owns object i); io relabels arbitrary
// endowments into it on input.
class Endowment {
 public:
  // owner_by_object[x] = the agent owning object x; must be a permutation.
  explicit Endowment(std::vector<int> owner_by_object);
  static Endowment canonical(int n);

  int n() const { return static_cast<int>(owner_by_object_.size()); }
  int owner(int object) const { return owner_by_object_.at(object); }
  int endowment_of(int agent) const { return object_by_agent_.at(agent); }
  bool is_identity() const;

 private:
  std::vector<int> owner_by_object_;
  std::vector<int> object_by_agent_;
};

// Shared validation helper: true iff `values` is a permutation of 0..n-1.
bool is_permutation_of_iota(const std::vector<int>& values, int n);

}  // namespace ttcv
