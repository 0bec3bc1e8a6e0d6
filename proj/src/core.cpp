#include "ttcv/core.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ttcv {

bool is_permutation_of_iota(const std::vector<int>& values, int n) {
  if (static_cast<int>(values.size()) != n) return false;
  std::vector<bool> seen(n, false);
  for (int v : values) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

Preference::Preference(std::vector<int> ranking) : ranking_(std::move(ranking)) {
  const int n = static_cast<int>(ranking_.size());
  if (n < 2) throw std::invalid_argument("Preference: need at least 2 objects");
  if (!is_permutation_of_iota(ranking_, n)) {
    throw std::invalid_argument("Preference: ranking is not a permutation of 0..n-1");
  }
  position_.assign(n, 0);
  for (int k = 0; k < n; ++k) position_[ranking_[k]] = k;
}

int Preference::position_of(int object) const {
  if (object < 0 || object >= n()) {
    throw std::out_of_range("Preference: object " + std::to_string(object) + " out of range");
  }
  return position_[object];
}

std::vector<int> Preference::upper_contour(int object) const {
  const int pos = position_of(object);
  return std::vector<int>(ranking_.begin(), ranking_.begin() + pos + 1);
}

long long Preference::count(int n) {
  long long f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

long long Preference::index() const {
  // Lehmer code of ranking_.
  const int n = this->n();
  long long idx = 0;
  for (int k = 0; k < n; ++k) {
    int smaller_later = 0;
    for (int j = k + 1; j < n; ++j) {
      if (ranking_[j] < ranking_[k]) ++smaller_later;
    }
    idx = idx * (n - k) + smaller_later;
  }
  return idx;
}

Preference Preference::from_index(int n, long long lex_index) {
  if (n < 2) throw std::invalid_argument("Preference: need at least 2 objects");
  const long long total = count(n);
  if (lex_index < 0 || lex_index >= total) {
    throw std::out_of_range("Preference: lexicographic index out of range");
  }
  std::vector<int> pool(n);
  for (int k = 0; k < n; ++k) pool[k] = k;
  std::vector<int> ranking;
  ranking.reserve(n);
  long long radix = total;
  for (int k = n; k >= 1; --k) {
    radix /= k;
    const int pick = static_cast<int>(lex_index / radix);
    lex_index %= radix;
    ranking.push_back(pool[pick]);
    pool.erase(pool.begin() + pick);
  }
  return Preference(std::move(ranking));
}

Profile::Profile(std::vector<Preference> prefs) : prefs_(std::move(prefs)) {
  const int n = static_cast<int>(prefs_.size());
  if (n < 2) throw std::invalid_argument("Profile: need at least 2 agents");
  for (const Preference& p : prefs_) {
    if (p.n() != n) {
      throw std::invalid_argument("Profile: preference size differs from agent count");
    }
  }
}

Profile Profile::with_pref(int agent, Preference p) const {
  std::vector<Preference> prefs = prefs_;
  prefs.at(agent) = std::move(p);
  return Profile(std::move(prefs));
}

long long Profile::space_size(int n) {
  if (n < 2) throw std::invalid_argument("Profile: need at least 2 agents");
  if (n > 6) throw std::invalid_argument("Profile: space size overflows past n = 6");
  const long long f = Preference::count(n);
  long long s = 1;
  for (int k = 0; k < n; ++k) s *= f;
  return s;
}

long long Profile::index() const {
  const long long f = Preference::count(n());
  long long idx = 0;
  for (const Preference& p : prefs_) idx = idx * f + p.index();
  return idx;
}

Profile Profile::from_index(int n, long long profile_index) {
  const long long size = space_size(n);
  if (profile_index < 0 || profile_index >= size) {
    throw std::out_of_range("Profile: index out of range");
  }
  const long long f = Preference::count(n);
  std::vector<long long> digits(n);
  for (int i = n - 1; i >= 0; --i) {
    digits[i] = profile_index % f;
    profile_index /= f;
  }
  std::vector<Preference> prefs;
  prefs.reserve(n);
  for (int i = 0; i < n; ++i) prefs.push_back(Preference::from_index(n, digits[i]));
  return Profile(std::move(prefs));
}

bool is_lottery(const Lottery& lottery) {
  Rational sum;
  for (const Rational& p : lottery) {
    if (p.sign() < 0) return false;
    sum += p;
  }
  return !lottery.empty() && sum.is_one();
}

AssignmentMatrix::AssignmentMatrix(int n, std::vector<Rational> row_major)
    : n_(n), entries_(std::move(row_major)) {
  if (n_ < 2) throw std::invalid_argument("AssignmentMatrix: need n >= 2");
  if (entries_.size() != static_cast<size_t>(n_) * n_) {
    throw std::invalid_argument("AssignmentMatrix: entry count is not n*n");
  }
  const Rational one(1);
  for (const Rational& e : entries_) {
    if (e.sign() < 0 || e > one) {
      throw std::invalid_argument("AssignmentMatrix: entry outside [0, 1]");
    }
  }
  for (int i = 0; i < n_; ++i) {
    Rational row_sum;
    for (int x = 0; x < n_; ++x) row_sum += at(i, x);
    if (!row_sum.is_one()) {
      throw std::invalid_argument("AssignmentMatrix: row " + std::to_string(i) +
                                  " sums to " + row_sum.str() + ", not 1");
    }
  }
  for (int x = 0; x < n_; ++x) {
    Rational col_sum;
    for (int i = 0; i < n_; ++i) col_sum += at(i, x);
    if (!col_sum.is_one()) {
      throw std::invalid_argument("AssignmentMatrix: column " + std::to_string(x) +
                                  " sums to " + col_sum.str() + ", not 1");
    }
  }
}

AssignmentMatrix AssignmentMatrix::identity(int n) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  return from_permutation(perm);
}

AssignmentMatrix AssignmentMatrix::from_permutation(const std::vector<int>& agent_to_object) {
  const int n = static_cast<int>(agent_to_object.size());
  if (!is_permutation_of_iota(agent_to_object, n)) {
    throw std::invalid_argument("AssignmentMatrix: not a permutation");
  }
  std::vector<Rational> entries(static_cast<size_t>(n) * n, Rational(0));
  for (int i = 0; i < n; ++i) entries[static_cast<size_t>(i) * n + agent_to_object[i]] = Rational(1);
  return AssignmentMatrix(n, std::move(entries));
}

const Rational& AssignmentMatrix::at(int agent, int object) const {
  if (agent < 0 || agent >= n_ || object < 0 || object >= n_) {
    throw std::out_of_range("AssignmentMatrix: index out of range");
  }
  return entries_[static_cast<size_t>(agent) * n_ + object];
}

Lottery AssignmentMatrix::row(int agent) const {
  Lottery r;
  r.reserve(n_);
  for (int x = 0; x < n_; ++x) r.push_back(at(agent, x));
  return r;
}

Rational AssignmentMatrix::row_mass(int agent, std::span<const int> objects) const {
  Rational mass;
  for (int x : objects) mass += at(agent, x);
  return mass;
}

bool AssignmentMatrix::is_deterministic() const {
  for (const Rational& e : entries_) {
    if (!e.is_zero() && !e.is_one()) return false;
  }
  return true;
}

std::optional<std::vector<int>> AssignmentMatrix::as_permutation() const {
  if (!is_deterministic()) return std::nullopt;
  std::vector<int> perm(n_, -1);
  for (int i = 0; i < n_; ++i) {
    for (int x = 0; x < n_; ++x) {
      if (at(i, x).is_one()) {
        perm[i] = x;
        break;
      }
    }
  }
  return perm;
}

Endowment::Endowment(std::vector<int> owner_by_object)
    : owner_by_object_(std::move(owner_by_object)) {
  const int n = static_cast<int>(owner_by_object_.size());
  if (n < 2) throw std::invalid_argument("Endowment: need n >= 2");
  if (!is_permutation_of_iota(owner_by_object_, n)) {
    throw std::invalid_argument("Endowment: owner map is not a bijection");
  }
  object_by_agent_.assign(n, 0);
  for (int x = 0; x < n; ++x) object_by_agent_[owner_by_object_[x]] = x;
}

Endowment Endowment::canonical(int n) {
  std::vector<int> owners(n);
  for (int x = 0; x < n; ++x) owners[x] = x;
  return Endowment(std::move(owners));
}

bool Endowment::is_identity() const {
  for (int x = 0; x < n(); ++x) {
    if (owner_by_object_[x] != x) return false;
  }
  return true;
}

}  // namespace ttcv
