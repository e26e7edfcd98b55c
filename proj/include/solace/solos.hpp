#pragma once

#include <array>
#include <cassert>
#include <cctype>
#include <functional>
#include <memory>

#include "solace/base.hpp"

namespace solace::solos {

enum class Type { V, W };
inline char type_char(Type t) { return t == Type::V ? 'V' : 'W'; }

// Triadic solo: u!<x1 x2 x3> (output) or u?<x1 x2 x3> (input), optional label.
struct Solo {
  bool is_input = false;
  Name subject;
  std::array<Name, 3> objects;
  std::string label;  // empty = unlabeled

  bool operator==(const Solo& o) const = default;
};

struct Term;
using TermP = std::shared_ptr<const Term>;

struct Term {
  enum Kind { Nil, Atom, Par, Nu } kind;
  Solo solo;                  // Atom
  Name binder;                // Nu
  std::optional<Type> annot;  // Nu
  TermP left, right;
};

inline TermP nil() {
  static TermP z = std::make_shared<Term>(Term{Term::Nil, {}, "", std::nullopt, nullptr, nullptr});
  return z;
}
inline TermP atom(Solo s) {
  return std::make_shared<Term>(Term{Term::Atom, std::move(s), "", std::nullopt, nullptr, nullptr});
}
inline TermP par(TermP a, TermP b) {
  return std::make_shared<Term>(Term{Term::Par, {}, "", std::nullopt, std::move(a), std::move(b)});
}
inline TermP nu(Name x, TermP p, std::optional<Type> annot = std::nullopt) {
  return std::make_shared<Term>(Term{Term::Nu, {}, std::move(x), annot, std::move(p), nullptr});
}

inline Solo in(Name u, Name a, Name b, Name c, std::string label = "") {
  return Solo{true, std::move(u), {std::move(a), std::move(b), std::move(c)}, std::move(label)};
}
inline Solo out(Name u, Name a, Name b, Name c, std::string label = "") {
  return Solo{false, std::move(u), {std::move(a), std::move(b), std::move(c)}, std::move(label)};
}

// --- flat form ---------------------------------------------------------------
//
// Structural congruence lets every solos term be written as
// new z1..zk.(s1 | ... | sn); reduction and congruence both work on this shape.

struct Binder {
  Name name;
  std::optional<Type> annot;
};

struct Flat {
  std::vector<Binder> binders;  // outermost first
  std::vector<Solo> solos;

  bool is_bound(const Name& n) const {
    for (auto& b : binders)
      if (b.name == n) return true;
    return false;
  }
};

inline void solo_names(const Solo& s, std::vector<Name>& out) {
  out.push_back(s.subject);
  for (auto& o : s.objects) out.push_back(o);
}

inline std::set<Name> free_names(const Flat& f) {
  std::set<Name> acc;
  for (auto& s : f.solos) {
    std::vector<Name> ns;
    solo_names(s, ns);
    for (auto& n : ns)
      if (!f.is_bound(n)) acc.insert(n);
  }
  return acc;
}

inline Solo rename_solo(const Solo& s, const std::map<Name, Name>& m) {
  auto r = [&](const Name& n) {
    auto it = m.find(n);
    return it == m.end() ? n : it->second;
  };
  Solo t = s;
  t.subject = r(s.subject);
  for (int i = 0; i < 3; i++) t.objects[i] = r(s.objects[i]);
  return t;
}

inline void flatten_into(const TermP& t, Flat& f, std::map<Name, Name>& ren, std::set<Name>& used, NameGen& gen) {
  switch (t->kind) {
    case Term::Nil:
      return;
    case Term::Atom: {
      std::map<Name, Name> m(ren.begin(), ren.end());
      f.solos.push_back(rename_solo(t->solo, m));
      return;
    }
    case Term::Par:
      flatten_into(t->left, f, ren, used, gen);
      flatten_into(t->right, f, ren, used, gen);
      return;
    case Term::Nu: {
      Name b = t->binder;
      Name nb = used.count(b) ? gen.fresh(b) : b;
      used.insert(nb);
      bool shadow = ren.count(b);
      Name saved = shadow ? ren[b] : "";
      ren[b] = nb;
      f.binders.push_back({nb, t->annot});
      flatten_into(t->left, f, ren, used, gen);
      if (shadow)
        ren[b] = saved;
      else
        ren.erase(b);
      return;
    }
  }
}

inline std::set<Name> term_free_names(const TermP& t);

inline Flat flatten(const TermP& t) {
  Flat f;
  std::map<Name, Name> ren;
  std::set<Name> used = term_free_names(t);
  NameGen gen;
  flatten_into(t, f, ren, used, gen);
  // drop binders with no occurrence
  std::set<Name> occ;
  for (auto& s : f.solos) {
    std::vector<Name> ns;
    solo_names(s, ns);
    occ.insert(ns.begin(), ns.end());
  }
  std::vector<Binder> keep;
  for (auto& b : f.binders)
    if (occ.count(b.name)) keep.push_back(b);
  f.binders = keep;
  return f;
}

inline std::set<Name> term_free_names(const TermP& t) {
  switch (t->kind) {
    case Term::Nil:
      return {};
    case Term::Atom: {
      std::vector<Name> ns;
      solo_names(t->solo, ns);
      return {ns.begin(), ns.end()};
    }
    case Term::Par: {
      auto a = term_free_names(t->left);
      auto b = term_free_names(t->right);
      a.insert(b.begin(), b.end());
      return a;
    }
    case Term::Nu: {
      auto a = term_free_names(t->left);
      a.erase(t->binder);
      return a;
    }
  }
  return {};
}

inline TermP from_flat(const Flat& f) {
  TermP body = nil();
  if (!f.solos.empty()) {
    body = atom(f.solos[0]);
    for (size_t i = 1; i < f.solos.size(); i++) body = par(body, atom(f.solos[i]));
  }
  for (auto it = f.binders.rbegin(); it != f.binders.rend(); ++it) body = nu(it->name, body, it->annot);
  return body;
}

// --- congruence (canonical labeling) ------------------------------------------

// One vertex per bound name plus one per solo; edges carry the occurrence
// position (0 = subject). Free names and polarities live in the solo colors.
inline CanonGraph congruence_graph(const Flat& f, bool with_labels = false) {
  CanonGraph g;
  std::map<Name, int> bvtx;
  for (auto& b : f.binders) bvtx[b.name] = g.add_vertex("B");
  for (auto& s : f.solos) {
    std::string color = s.is_input ? "in" : "out";
    if (with_labels) color += "@" + s.label;
    std::vector<std::pair<int, Name>> occs;
    occs.push_back({0, s.subject});
    for (int i = 0; i < 3; i++) occs.push_back({i + 1, s.objects[i]});
    for (auto& [pos, n] : occs)
      if (!bvtx.count(n)) color += "|" + std::to_string(pos) + "=" + n;
    int v = g.add_vertex(color);
    for (auto& [pos, n] : occs) {
      auto it = bvtx.find(n);
      if (it != bvtx.end()) g.add_edge(v, it->second, pos, 100);
    }
  }
  return g;
}

inline std::string canonical_key(const TermP& t) {
  return congruence_graph(flatten(t)).canonical_string();
}

inline bool congruent(const TermP& a, const TermP& b) {
  return canonical_key(a) == canonical_key(b);
}

// Canonical form: binders reordered canonically, unused scopes dropped,
// solos sorted; display names preserved.
inline TermP canonicalize(const TermP& t) {
  Flat f = flatten(t);
  CanonGraph g = congruence_graph(f);
  auto order = g.canonical_order();  // rank -> vertex
  size_t nb = f.binders.size();
  Flat out;
  std::vector<size_t> solo_ranks;
  for (size_t r = 0; r < order.size(); r++) {
    int v = order[r];
    if (v < (int)nb)
      out.binders.push_back(f.binders[v]);
    else
      solo_ranks.push_back(v - nb);
  }
  for (size_t i : solo_ranks) out.solos.push_back(f.solos[i]);
  return from_flat(out);
}

// --- unification ---------------------------------------------------------------

struct Unifier {
  std::vector<std::vector<Name>> classes;  // nontrivial classes only
  std::map<Name, Name> representative;     // per class member
  std::map<Name, Name> substitution;       // moved names only (idempotent)
};

struct UnifyFailure {
  Name free_a, free_b;  // two free names forced equal
};

// Most general unifier of the two object triples. `bound` is the enclosing
// binder list in scope order; every modified name must come from it.
inline std::optional<Unifier> unify(const Solo& out_s, const Solo& in_s, const std::vector<Name>& bound,
                                    UnifyFailure* fail = nullptr) {
  assert(!out_s.is_input && in_s.is_input && out_s.subject == in_s.subject);
  auto bindex = [&](const Name& n) -> int {
    for (size_t i = 0; i < bound.size(); i++)
      if (bound[i] == n) return (int)i;
    return -1;  // free
  };
  // union-find over the involved names
  std::map<Name, Name> parent;
  std::function<Name(const Name&)> find = [&](const Name& n) -> Name {
    auto it = parent.find(n);
    if (it == parent.end() || it->second == n) return n;
    Name r = find(it->second);
    parent[n] = r;
    return r;
  };
  for (int i = 0; i < 3; i++) {
    Name a = find(out_s.objects[i]);
    Name b = find(in_s.objects[i]);
    if (a != b) parent[a] = b;
  }
  std::map<Name, std::vector<Name>> cls;
  std::set<Name> all;
  for (int i = 0; i < 3; i++) {
    all.insert(out_s.objects[i]);
    all.insert(in_s.objects[i]);
  }
  for (auto& n : all) cls[find(n)].push_back(n);
  Unifier u;
  for (auto& [root, members] : cls) {
    // representative: the free name if any, else smallest binder index
    Name rep;
    int best = -1;
    int frees = 0;
    Name free_seen;
    for (auto& m : members) {
      int bi = bindex(m);
      if (bi < 0) {
        frees++;
        if (frees >= 2) {
          if (fail) *fail = {free_seen, m};
          return std::nullopt;
        }
        free_seen = m;
        rep = m;
        best = -2;  // free wins
      } else if (best != -2 && (best < 0 || bi < best)) {
        best = bi;
        rep = m;
      }
    }
    for (auto& m : members) {
      u.representative[m] = rep;
      if (m != rep) u.substitution[m] = rep;
    }
    if (members.size() > 1) {
      std::sort(members.begin(), members.end());
      u.classes.push_back(members);
    }
  }
  std::sort(u.classes.begin(), u.classes.end());
  return u;
}

// --- reduction -----------------------------------------------------------------

struct Redex {
  size_t out_idx, in_idx;  // positions in Flat::solos
  Unifier unifier;
};

inline std::vector<Redex> redexes(const Flat& f) {
  std::vector<Name> bound;
  for (auto& b : f.binders) bound.push_back(b.name);
  std::vector<Redex> out;
  for (size_t i = 0; i < f.solos.size(); i++) {
    for (size_t j = 0; j < f.solos.size(); j++) {
      if (f.solos[i].is_input || !f.solos[j].is_input) continue;
      if (f.solos[i].subject != f.solos[j].subject) continue;
      auto u = unify(f.solos[i], f.solos[j], bound);
      if (u) out.push_back({i, j, *u});
    }
  }
  return out;
}

inline Flat apply_redex(const Flat& f, const Redex& r) {
  Flat g;
  std::map<Name, Name> sub(r.unifier.substitution.begin(), r.unifier.substitution.end());
  for (size_t k = 0; k < f.solos.size(); k++) {
    if (k == r.out_idx || k == r.in_idx) continue;
    g.solos.push_back(rename_solo(f.solos[k], sub));
  }
  std::set<Name> occ;
  for (auto& s : g.solos) {
    std::vector<Name> ns;
    solo_names(s, ns);
    occ.insert(ns.begin(), ns.end());
  }
  for (auto& b : f.binders)
    if (occ.count(b.name)) g.binders.push_back(b);
  return g;
}

inline std::vector<TermP> reduce_steps(const TermP& t) {
  Flat f = flatten(t);
  std::vector<TermP> reducts;
  std::vector<std::string> seen;
  for (auto& r : redexes(f)) {
    TermP red = canonicalize(from_flat(apply_redex(f, r)));
    std::string key = canonical_key(red);
    if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
      seen.push_back(key);
      reducts.push_back(red);
    }
  }
  return reducts;
}

// --- parsing / printing ----------------------------------------------------------
//
// P ::= '0' | name ('!'|'?') '<' name name name '>' ['@' label]
//     |ated with '|' | 'new' name [':' ('V'|'W')] '.' P | '(' P ')'

namespace detail {
struct Parser {
  const std::string& s;
  size_t pos = 0;
  explicit Parser(const std::string& str) : s(str) {}

  void ws() {
    while (pos < s.size() && isspace((unsigned char)s[pos])) pos++;
  }
  bool eat(char c) {
    ws();
    if (pos < s.size() && s[pos] == c) {
      pos++;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) throw parse_error(std::string("expected '") + c + "' at offset " + std::to_string(pos));
  }
  std::optional<Name> ident() {
    ws();
    if (pos >= s.size() || !(isalpha((unsigned char)s[pos]) || s[pos] == '_')) return std::nullopt;
    size_t start = pos;
    while (pos < s.size() && (isalnum((unsigned char)s[pos]) || s[pos] == '_' || s[pos] == '\'')) pos++;
    return s.substr(start, pos - start);
  }
  bool keyword(const std::string& kw) {
    ws();
    size_t save = pos;
    auto id = ident();
    if (id && *id == kw) return true;
    pos = save;
    return false;
  }

  TermP term() {
    TermP t = atom_();
    while (true) {
      ws();
      if (eat('|'))
        t = par(t, atom_());
      else
        break;
    }
    return t;
  }

  TermP atom_() {
    ws();
    if (pos >= s.size()) throw parse_error("unexpected end of input");
    if (eat('(')) {
      TermP t = term();
      expect(')');
      return t;
    }
    if (s[pos] == '0') {
      pos++;
      return nil();
    }
    if (keyword("new")) {
      auto x = ident();
      if (!x) throw parse_error("expected name after 'new'");
      std::optional<Type> ty;
      if (eat(':')) {
        ws();
        if (pos < s.size() && (s[pos] == 'V' || s[pos] == 'W')) {
          ty = s[pos] == 'V' ? Type::V : Type::W;
          pos++;
        } else {
          throw parse_error("expected type V or W");
        }
      }
      expect('.');
      return nu(*x, term(), ty);
    }
    auto u = ident();
    if (!u) throw parse_error("expected term at offset " + std::to_string(pos));
    ws();
    bool isin;
    if (eat('!'))
      isin = false;
    else if (eat('?'))
      isin = true;
    else
      throw parse_error("expected '!' or '?' after subject");
    expect('<');
    std::array<Name, 3> obj;
    for (int i = 0; i < 3; i++) {
      auto o = ident();
      if (!o) throw parse_error("expected object name");
      obj[i] = *o;
    }
    expect('>');
    std::string label;
    if (eat('@')) {
      auto l = ident();
      if (!l) throw parse_error("expected label after '@'");
      label = *l;
    }
    Solo sl{isin, *u, obj, label};
    return atom(sl);
  }
};
}  // namespace detail

inline TermP parse(const std::string& text) {
  detail::Parser p(text);
  TermP t = p.term();
  p.ws();
  if (p.pos != text.size()) throw parse_error("trailing input at offset " + std::to_string(p.pos));
  return t;
}

inline std::string print_solo(const Solo& s, const std::map<Name, Name>& ren) {
  auto nm = [&](const Name& n) {
    auto it = ren.find(n);
    return it == ren.end() ? n : it->second;
  };
  std::string out = nm(s.subject) + (s.is_input ? "?<" : "!<");
  for (int i = 0; i < 3; i++) {
    if (i) out += " ";
    out += nm(s.objects[i]);
  }
  out += ">";
  if (!s.label.empty()) out += "@" + s.label;
  return out;
}

inline std::string print(const TermP& t, bool with_annots = true) {
  Flat f = flatten(t);
  std::map<Name, Name> ren;
  std::set<Name> taken = free_names(f);
  std::string out;
  for (auto& b : f.binders) {
    Name disp;
    if (is_generated_name(b.name) || taken.count(b.name)) {
      disp = display_name(b.name, taken);
    } else {
      disp = b.name;
      taken.insert(disp);
    }
    ren[b.name] = disp;
    out += "new " + disp;
    if (with_annots && b.annot) out += std::string(":") + type_char(*b.annot);
    out += ". ";
  }
  if (f.solos.empty()) {
    out += "0";
    return out;
  }
  if (f.solos.size() > 1) out += "(";
  for (size_t i = 0; i < f.solos.size(); i++) {
    if (i) out += " | ";
    out += print_solo(f.solos[i], ren);
  }
  if (f.solos.size() > 1) out += ")";
  return out;
}

inline size_t solo_count(const TermP& t) { return flatten(t).solos.size(); }

}  // namespace solace::solos
