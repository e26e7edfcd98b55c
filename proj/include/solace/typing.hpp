#pragma once

#include <functional>
#include <variant>

#include "solace/solos.hpp"

namespace solace::typing {

using solos::Type;

enum class Protocol { S, R };
inline char protocol_char(Protocol p) { return p == Protocol::S ? 'S' : 'R'; }

using Context = std::map<Name, Type>;

// Per-solo record of a derivation: subject type plus the protocol carried by
// each object position. The decorated rules are
//   subject V, input  : W^R W^S V^S        subject V, output : W^S W^R V^R
//   subject W, input  : W^R V^S V^R        subject W, output : W^S V^R V^S
struct SoloTyping {
  solos::Solo solo;
  Type subject_type;
  std::array<Type, 3> object_types;
  std::array<Protocol, 3> protocols;
};

struct Derivation {
  Context gamma;                 // free names
  std::vector<solos::Binder> binders;  // all annotated
  std::vector<SoloTyping> solos;
};

struct CheckFailure {
  std::string message;
  std::optional<solos::Solo> solo;
  int position = -1;  // 0 = subject, 1..3 object; -1 n/a
};

inline std::array<Type, 3> object_types_for(Type subject) {
  // V ::= W W V,  W ::= W V V
  if (subject == Type::V) return {Type::W, Type::W, Type::V};
  return {Type::W, Type::V, Type::V};
}

inline std::array<Protocol, 3> protocols_for(Type subject, bool is_input) {
  std::array<Protocol, 3> in_proto = subject == Type::V
                                         ? std::array<Protocol, 3>{Protocol::R, Protocol::S, Protocol::S}
                                         : std::array<Protocol, 3>{Protocol::R, Protocol::S, Protocol::R};
  if (is_input) return in_proto;
  for (auto& p : in_proto) p = p == Protocol::S ? Protocol::R : Protocol::S;
  return in_proto;
}

// Check a fully annotated term under gamma (free names).
inline std::variant<Derivation, CheckFailure> check_typed(const Context& gamma, const solos::TermP& t) {
  solos::Flat f = solos::flatten(t);
  std::map<Name, Type> env(gamma.begin(), gamma.end());
  for (auto& b : f.binders) {
    if (!b.annot) return CheckFailure{"missing annotation on binder " + b.name, std::nullopt, -1};
    env[b.name] = *b.annot;
  }
  Derivation d;
  d.gamma = gamma;
  d.binders = f.binders;
  for (auto& s : f.solos) {
    auto it = env.find(s.subject);
    if (it == env.end()) return CheckFailure{"subject " + s.subject + " not in context", s, 0};
    Type st = it->second;
    auto want = object_types_for(st);
    SoloTyping ts{s, st, want, protocols_for(st, s.is_input)};
    for (int i = 0; i < 3; i++) {
      auto oi = env.find(s.objects[i]);
      if (oi == env.end()) return CheckFailure{"object " + s.objects[i] + " not in context", s, i + 1};
      if (oi->second != want[i]) {
        return CheckFailure{"object " + s.objects[i] + " has type " + solos::type_char(oi->second) +
                               ", rule needs " + solos::type_char(want[i]),
                           s, i + 1};
      }
    }
    d.solos.push_back(ts);
  }
  return d;
}

struct InferFailure {
  std::string message;
  std::optional<solos::Solo> a, b;  // a minimal conflicting pair when known
};

struct Inferred {
  solos::TermP term;  // fully annotated
  Context gamma;      // minimal context for the free names
  Derivation derivation;
};

// Type inference over the two-valued domain. The rules force, for any solo
// with names (u, a, b, c): a:W, c:V and b dual to u; this is plain parity
// propagation with unconstrained names defaulting to W.
inline std::variant<Inferred, InferFailure> infer_types(const solos::TermP& t) {
  solos::Flat f = solos::flatten(t);
  std::set<Name> names;
  for (auto& s : f.solos) {
    std::vector<Name> ns;
    solos::solo_names(s, ns);
    names.insert(ns.begin(), ns.end());
  }
  // union-find with parity: rank[n] relative to root (0 same, 1 dual)
  std::map<Name, Name> parent;
  std::map<Name, int> parity;
  std::function<std::pair<Name, int>(const Name&)> find = [&](const Name& n) -> std::pair<Name, int> {
    if (!parent.count(n) || parent[n] == n) return {n, 0};
    auto [r, p] = find(parent[n]);
    parent[n] = r;
    parity[n] = (parity[n] + p) % 2;
    return {r, parity[n]};
  };
  std::map<Name, std::optional<bool>> fixed_root;  // root -> isV
  // track one witness solo per forced fact for conflict reporting
  std::map<Name, solos::Solo> witness;
  auto set_fixed = [&](const Name& n, bool isV, const solos::Solo& s) -> bool {
    auto [r, p] = find(n);
    bool root_val = (p == 0) ? isV : !isV;
    auto& slot = fixed_root[r];
    if (slot && *slot != root_val) return false;
    if (!slot) {
      slot = root_val;
      witness.emplace(r, s);
    }
    return true;
  };
  auto link_dual = [&](const Name& a, const Name& b, const solos::Solo& s) -> bool {
    auto [ra, pa] = find(a);
    auto [rb, pb] = find(b);
    if (ra == rb) return (pa + pb) % 2 == 1;
    // merge rb into ra with parity so that a and b are dual
    int rel = (pa + pb + 1) % 2;
    parent[rb] = ra;
    parity[rb] = rel;
    auto itb = fixed_root.find(rb);
    if (itb != fixed_root.end() && itb->second) {
      bool rb_val = *itb->second;
      bool ra_val = rel == 0 ? rb_val : !rb_val;
      auto& slot = fixed_root[ra];
      if (slot && *slot != ra_val) return false;
      if (!slot) {
        slot = ra_val;
        auto wit = witness.find(rb);
        if (wit != witness.end()) witness.emplace(ra, wit->second);
      }
    }
    return true;
  };
  for (auto& s : f.solos) {
    if (!set_fixed(s.objects[0], false, s))
      return InferFailure{"position 1 of " + s.subject + "-solo must be W", s, witness.count(find(s.objects[0]).first) ? std::optional<solos::Solo>(witness[find(s.objects[0]).first]) : std::nullopt};
    if (!set_fixed(s.objects[2], true, s))
      return InferFailure{"position 3 of " + s.subject + "-solo must be V", s, witness.count(find(s.objects[2]).first) ? std::optional<solos::Solo>(witness[find(s.objects[2]).first]) : std::nullopt};
    if (!link_dual(s.subject, s.objects[1], s))
      return InferFailure{"position 2 of " + s.subject + "-solo must be dual to its subject", s, s};
  }
  // respect existing annotations
  for (auto& b : f.binders) {
    if (b.annot) {
      solos::Solo dummy;
      if (!set_fixed(b.name, *b.annot == Type::V, dummy))
        return InferFailure{"annotation " + b.name + ":" + solos::type_char(*b.annot) + " conflicts", std::nullopt,
                            std::nullopt};
    }
  }
  auto type_of = [&](const Name& n) -> Type {
    auto [r, p] = find(n);
    auto it = fixed_root.find(r);
    bool root_isV = (it != fixed_root.end() && it->second) ? *it->second : false;  // default W
    bool isV = p == 0 ? root_isV : !root_isV;
    return isV ? Type::V : Type::W;
  };
  solos::Flat g = f;
  for (auto& b : g.binders) b.annot = type_of(b.name);
  Context gamma;
  for (auto& n : solos::free_names(f)) gamma[n] = type_of(n);
  solos::TermP annotated = solos::from_flat(g);
  auto chk = check_typed(gamma, annotated);
  if (std::holds_alternative<CheckFailure>(chk))
    return InferFailure{"internal: inferred assignment fails check: " + std::get<CheckFailure>(chk).message,
                        std::nullopt, std::nullopt};
  return Inferred{annotated, gamma, std::get<Derivation>(chk)};
}

// --- guard relation and acyclicity ---------------------------------------------

struct GuardRelation {
  size_t n = 0;
  std::vector<std::vector<bool>> triangle;       // s < t  (s guards t's subject)
  std::vector<std::vector<bool>> triangle_star;  // reflexive-transitive closure
  std::vector<std::pair<size_t, size_t>> perp;   // dual pairs (unordered, i<j)
  std::vector<size_t> roots;
};

inline bool has_r_occurrence(const SoloTyping& s, const Name& x) {
  for (int i = 0; i < 3; i++)
    if (s.solo.objects[i] == x && s.protocols[i] == Protocol::R) return true;
  return false;
}

inline bool has_s_occurrence(const SoloTyping& s, const Name& x) {
  for (int i = 0; i < 3; i++)
    if (s.solo.objects[i] == x && s.protocols[i] == Protocol::S) return true;
  return false;
}

inline GuardRelation guard_relation(const Derivation& d) {
  GuardRelation g;
  g.n = d.solos.size();
  g.triangle.assign(g.n, std::vector<bool>(g.n, false));
  for (size_t i = 0; i < g.n; i++)
    for (size_t j = 0; j < g.n; j++)
      if (has_r_occurrence(d.solos[i], d.solos[j].solo.subject)) g.triangle[i][j] = true;
  g.triangle_star = g.triangle;
  for (size_t i = 0; i < g.n; i++) g.triangle_star[i][i] = true;
  for (size_t k = 0; k < g.n; k++)
    for (size_t i = 0; i < g.n; i++)
      for (size_t j = 0; j < g.n; j++)
        if (g.triangle_star[i][k] && g.triangle_star[k][j]) g.triangle_star[i][j] = true;
  for (size_t i = 0; i < g.n; i++)
    for (size_t j = i + 1; j < g.n; j++)
      if (d.solos[i].solo.subject == d.solos[j].solo.subject &&
          d.solos[i].solo.is_input != d.solos[j].solo.is_input)
        g.perp.push_back({i, j});
  for (size_t j = 0; j < g.n; j++) {
    bool root = true;
    for (size_t i = 0; i < g.n; i++)
      if (g.triangle[i][j]) root = false;
    if (root) g.roots.push_back(j);
  }
  return g;
}

struct AcyclicityReport {
  bool pass = true;
  std::string condition;  // "AC1".."AC5"
  std::string witness;
};

// AC1..AC5 evaluated literally over the decoration and the guard relation.
inline AcyclicityReport check_acyclic(const Derivation& d) {
  GuardRelation g = guard_relation(d);
  auto solo_str = [&](size_t i) { return solos::print_solo(d.solos[i].solo, {}); };
  // AC1: each name has at most one R-occurrence
  std::map<Name, int> rcount;
  for (auto& st : d.solos)
    for (int i = 0; i < 3; i++)
      if (st.protocols[i] == Protocol::R) rcount[st.solo.objects[i]]++;
  for (auto& [n, c] : rcount)
    if (c > 1) return {false, "AC1", "name " + n + " has " + std::to_string(c) + " R-occurrences"};
  // AC2: s perp t implies both roots
  auto is_root = [&](size_t i) {
    return std::find(g.roots.begin(), g.roots.end(), i) != g.roots.end();
  };
  for (auto& [i, j] : g.perp) {
    if (!is_root(i)) return {false, "AC2", "dual solo " + solo_str(i) + " is not a root"};
    if (!is_root(j)) return {false, "AC2", "dual solo " + solo_str(j) + " is not a root"};
  }
  // AC3: s < x and x in t implies s <* t
  for (size_t s = 0; s < g.n; s++) {
    for (auto& [x, c] : rcount) {
      (void)c;
      if (!has_r_occurrence(d.solos[s], x)) continue;
      for (size_t t = 0; t < g.n; t++) {
        bool x_in_t = false;
        for (int i = 0; i < 3; i++)
          if (d.solos[t].solo.objects[i] == x) x_in_t = true;
        if (x_in_t && !g.triangle_star[s][t])
          return {false, "AC3",
                  "solo " + solo_str(s) + " guards " + x + " but does not reach " + solo_str(t)};
      }
    }
  }
  // AC4: x^S in s and s < x implies s is an input
  for (size_t s = 0; s < g.n; s++) {
    for (int i = 0; i < 3; i++) {
      Name x = d.solos[s].solo.objects[i];
      if (d.solos[s].protocols[i] == Protocol::S && has_r_occurrence(d.solos[s], x) &&
          !d.solos[s].solo.is_input)
        return {false, "AC4", "output solo " + solo_str(s) + " holds both S- and R-occurrences of " + x};
    }
  }
  // AC5: no free name with an R-occurrence
  std::set<Name> bound;
  for (auto& b : d.binders) bound.insert(b.name);
  for (auto& st : d.solos)
    for (int i = 0; i < 3; i++)
      if (st.protocols[i] == Protocol::R && !bound.count(st.solo.objects[i]))
        return {false, "AC5", "free name " + st.solo.objects[i] + " has an R-occurrence in " +
                                  solos::print_solo(st.solo, {})};
  return {};
}

// Gamma_X: pi free names at W (with the translation's top binder at V inside).
inline Context gamma_for_pi(const std::set<Name>& pi_free) {
  Context g;
  for (auto& n : pi_free) g[n] = Type::W;
  return g;
}

}  // namespace solace::typing
