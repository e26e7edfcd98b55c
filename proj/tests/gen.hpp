#pragma once

// Random term/net generators shared by the unit and acceptance suites.

#include <random>

#include "solace/pi.hpp"
#include "solace/solos.hpp"
#include "solace/typing.hpp"

namespace solace::gen {

using Rng = std::mt19937_64;

inline Name pick(Rng& rng, const std::vector<Name>& pool) {
  return pool[rng() % pool.size()];
}

// Random pi-term with at most `budget` constructors.
inline pi::TermP random_pi(Rng& rng, int budget, std::vector<Name> scope = {"u", "x", "y"}, int depth = 0) {
  if (budget <= 1) return pi::nil();
  int kind = (int)(rng() % 10);
  auto sub = [&](int b) { return random_pi(rng, b, scope, depth + 1); };
  if (kind < 3) {  // output
    return pi::output(pick(rng, scope), pick(rng, scope), sub(budget - 1));
  }
  if (kind < 6) {  // input
    Name b = "n" + std::to_string(depth) + "_" + std::to_string(rng() % 3);
    auto s2 = scope;
    s2.push_back(b);
    return pi::input(pick(rng, scope), b, random_pi(rng, budget - 1, s2, depth + 1));
  }
  if (kind < 8) {  // par
    int l = 1 + (int)(rng() % std::max(1, budget - 2));
    return pi::par(sub(l), random_pi(rng, budget - 1 - l, scope, depth + 1));
  }
  // nu
  Name b = "m" + std::to_string(depth) + "_" + std::to_string(rng() % 3);
  auto s2 = scope;
  s2.push_back(b);
  return pi::nu(b, random_pi(rng, budget - 1, s2, depth + 1));
}

// Random untyped solos term: a few binders, a few solos over a mixed pool.
inline solos::TermP random_solos(Rng& rng, int max_solos = 5) {
  std::vector<Name> frees = {"u", "v", "t"};
  int nb = 1 + (int)(rng() % 4);
  std::vector<Name> bound;
  for (int i = 0; i < nb; i++) bound.push_back("b" + std::to_string(i));
  std::vector<Name> pool = frees;
  pool.insert(pool.end(), bound.begin(), bound.end());
  int ns = 1 + (int)(rng() % max_solos);
  solos::Flat f;
  for (auto& b : bound) f.binders.push_back({b, std::nullopt});
  for (int i = 0; i < ns; i++) {
    solos::Solo s;
    s.is_input = rng() % 2;
    s.subject = pick(rng, pool);
    for (int k = 0; k < 3; k++) s.objects[k] = pick(rng, pool);
    f.solos.push_back(s);
  }
  // drop unused binders
  return solos::canonicalize(solos::from_flat(f));
}

// Random well-typed annotated solos term: fix a type per name first, then
// emit solos whose objects match the subject's rule.
inline solos::TermP random_typed_solos(Rng& rng, int max_solos = 5) {
  using solos::Type;
  std::vector<Name> vnames, wnames;
  int nv = 2 + (int)(rng() % 3), nw = 2 + (int)(rng() % 3);
  for (int i = 0; i < nv; i++) vnames.push_back("p" + std::to_string(i));
  for (int i = 0; i < nw; i++) wnames.push_back("q" + std::to_string(i));
  auto pickty = [&](Type t) { return t == Type::V ? pick(rng, vnames) : pick(rng, wnames); };
  solos::Flat f;
  int ns = 1 + (int)(rng() % max_solos);
  for (int i = 0; i < ns; i++) {
    solos::Solo s;
    s.is_input = rng() % 2;
    Type st = rng() % 2 ? Type::V : Type::W;
    s.subject = pickty(st);
    auto obj = typing::object_types_for(st);
    for (int k = 0; k < 3; k++) s.objects[k] = pickty(obj[k]);
    f.solos.push_back(s);
  }
  // bind a random subset (bound names get annotations; the rest form gamma)
  std::set<Name> used;
  for (auto& s : f.solos) {
    std::vector<Name> ns2;
    solos::solo_names(s, ns2);
    used.insert(ns2.begin(), ns2.end());
  }
  for (auto& n : used) {
    if (rng() % 2) {
      Type t = std::find(vnames.begin(), vnames.end(), n) != vnames.end() ? Type::V : Type::W;
      f.binders.push_back({n, t});
    }
  }
  return solos::from_flat(f);
}

inline typing::Context context_of(const solos::TermP& t) {
  using solos::Type;
  typing::Context gamma;
  solos::Flat f = solos::flatten(t);
  for (auto& n : solos::free_names(f)) {
    gamma[n] = n.size() && n[0] == 'p' ? Type::V : Type::W;
  }
  return gamma;
}

}  // namespace solace::gen
