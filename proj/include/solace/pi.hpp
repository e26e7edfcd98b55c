#pragma once

#include <cassert>
#include <cctype>
#include <functional>
#include <memory>

#include "solace/base.hpp"

namespace solace::pi {

// Monadic finitary pi-calculus: 0 | u?x.P | u!x.P | (P|Q) | new x.P
struct Term;
using TermP = std::shared_ptr<const Term>;

struct Term {
  enum Kind { Nil, Input, Output, Par, Nu } kind;
  Name subject;  // Input/Output
  Name name;     // Input: binder; Output: object; Nu: binder
  TermP left;    // Par left / prefix body / Nu body
  TermP right;   // Par right
};

inline TermP nil() {
  static TermP z = std::make_shared<Term>(Term{Term::Nil, "", "", nullptr, nullptr});
  return z;
}
inline TermP input(Name u, Name x, TermP p) {
  return std::make_shared<Term>(Term{Term::Input, std::move(u), std::move(x), std::move(p), nullptr});
}
inline TermP output(Name u, Name x, TermP p) {
  return std::make_shared<Term>(Term{Term::Output, std::move(u), std::move(x), std::move(p), nullptr});
}
inline TermP par(TermP a, TermP b) {
  return std::make_shared<Term>(Term{Term::Par, "", "", std::move(a), std::move(b)});
}
inline TermP nu(Name x, TermP p) {
  return std::make_shared<Term>(Term{Term::Nu, "", std::move(x), std::move(p), nullptr});
}

inline void collect_free(const TermP& t, std::set<Name>& acc, std::set<Name>& bound) {
  switch (t->kind) {
    case Term::Nil:
      return;
    case Term::Input: {
      if (!bound.count(t->subject)) acc.insert(t->subject);
      bool fresh = bound.insert(t->name).second;
      collect_free(t->left, acc, bound);
      if (fresh) bound.erase(t->name);
      return;
    }
    case Term::Output:
      if (!bound.count(t->subject)) acc.insert(t->subject);
      if (!bound.count(t->name)) acc.insert(t->name);
      collect_free(t->left, acc, bound);
      return;
    case Term::Par:
      collect_free(t->left, acc, bound);
      collect_free(t->right, acc, bound);
      return;
    case Term::Nu: {
      bool fresh = bound.insert(t->name).second;
      collect_free(t->left, acc, bound);
      if (fresh) bound.erase(t->name);
      return;
    }
  }
}

inline std::set<Name> free_names(const TermP& t) {
  std::set<Name> acc, bound;
  collect_free(t, acc, bound);
  return acc;
}

// Capture-avoiding substitution of `from` by `to` on free occurrences.
inline TermP substitute(const TermP& t, const Name& from, const Name& to, NameGen& gen) {
  auto sub_name = [&](const Name& n) { return n == from ? to : n; };
  switch (t->kind) {
    case Term::Nil:
      return t;
    case Term::Output:
      return output(sub_name(t->subject), sub_name(t->name), substitute(t->left, from, to, gen));
    case Term::Par:
      return par(substitute(t->left, from, to, gen), substitute(t->right, from, to, gen));
    case Term::Input:
    case Term::Nu: {
      Name subj = t->kind == Term::Input ? sub_name(t->subject) : "";
      Name b = t->name;
      TermP body = t->left;
      if (b == from) {
        // binder shadows: body untouched
      } else {
        if (b == to && free_names(body).count(from)) {
          Name nb = gen.fresh(b);
          body = substitute(body, b, nb, gen);
          b = nb;
        }
        body = substitute(body, from, to, gen);
      }
      return t->kind == Term::Input ? input(subj, b, body) : nu(b, body);
    }
  }
  return t;
}

inline TermP substitute(const TermP& t, const Name& from, const Name& to) {
  NameGen gen;
  return substitute(t, from, to, gen);
}

// --- layer normal form -------------------------------------------------------
//
// Each "layer" is new x1..xk.(c1 | ... | cn) with every ci a prefix, scopes
// hoisted maximally and Nil dropped. Structural congruence is decided on this
// shape: binder order and component order are searched for a least rendering.

struct Layer {
  std::vector<Name> binders;
  std::vector<TermP> comps;  // Input/Output only
};

inline void flatten_into(const TermP& t, Layer& layer, NameGen& gen, std::set<Name>& used) {
  switch (t->kind) {
    case Term::Nil:
      return;
    case Term::Par:
      flatten_into(t->left, layer, gen, used);
      flatten_into(t->right, layer, gen, used);
      return;
    case Term::Nu: {
      Name b = t->name;
      TermP body = t->left;
      if (used.count(b)) {
        Name nb = gen.fresh(b);
        body = substitute(body, b, nb, gen);
        b = nb;
      }
      used.insert(b);
      layer.binders.push_back(b);
      flatten_into(body, layer, gen, used);
      return;
    }
    default:
      layer.comps.push_back(t);
      return;
  }
}

inline Layer to_layer(const TermP& t, std::set<Name> used = {}) {
  // `used` must cover every name free in t
  for (auto& n : free_names(t)) used.insert(n);
  NameGen gen;
  Layer l;
  flatten_into(t, l, gen, used);
  // drop binders without occurrence
  std::set<Name> occ;
  for (auto& c : l.comps) {
    auto fn = free_names(c);
    occ.insert(fn.begin(), fn.end());
  }
  std::vector<Name> keep;
  for (auto& b : l.binders)
    if (occ.count(b)) keep.push_back(b);
  l.binders = keep;
  return l;
}

inline TermP from_layer(const Layer& l) {
  TermP body = nil();
  if (!l.comps.empty()) {
    body = l.comps[0];
    for (size_t i = 1; i < l.comps.size(); i++) body = par(body, l.comps[i]);
  }
  for (auto it = l.binders.rbegin(); it != l.binders.rend(); ++it) body = nu(*it, body);
  return body;
}

// canonical rendering ---------------------------------------------------------

inline std::string canon_render(const TermP& t, std::map<Name, std::string>& env, int depth);

inline std::string canon_layer(const TermP& t, std::map<Name, std::string>& env, int depth) {
  Layer l = to_layer(t);
  size_t nb = l.binders.size();
  // Signature-based pre-grouping of binders, then exhaustive permutations
  // within tie groups; least rendering wins.
  auto render_with = [&](const std::vector<Name>& order) {
    std::map<Name, std::string> e2 = env;
    for (size_t i = 0; i < order.size(); i++)
      e2[order[i]] = "\x01b" + std::to_string(depth) + "_" + std::to_string(i);
    std::vector<std::string> rs;
    for (auto& c : l.comps) rs.push_back(canon_render(c, e2, depth + 1));
    std::sort(rs.begin(), rs.end());
    std::string out = "(";
    for (size_t i = 0; i < rs.size(); i++) {
      if (i) out += "|";
      out += rs[i];
    }
    out += ")";
    return out;
  };
  if (nb == 0) return render_with({});
  // per-binder signature: renderings with only that binder marked
  std::vector<std::pair<std::string, Name>> sig;
  for (auto& b : l.binders) {
    std::map<Name, std::string> e2 = env;
    for (auto& o : l.binders) e2[o] = (o == b) ? "\x01X" : "\x01_";
    std::vector<std::string> rs;
    for (auto& c : l.comps) rs.push_back(canon_render(c, e2, depth + 1));
    std::sort(rs.begin(), rs.end());
    std::string s;
    for (auto& r : rs) s += r + ";";
    sig.push_back({s, b});
  }
  std::stable_sort(sig.begin(), sig.end());
  // tie groups
  std::vector<std::vector<Name>> groups;
  for (size_t i = 0; i < sig.size(); i++) {
    if (i == 0 || sig[i].first != sig[i - 1].first) groups.emplace_back();
    groups.back().push_back(sig[i].second);
  }
  long perms = 1;
  for (auto& g : groups) {
    long f = 1;
    for (size_t i = 2; i <= g.size(); i++) f *= (long)i;
    perms *= f;
    if (perms > 100000) throw std::runtime_error("pi congruence: layer too symmetric");
  }
  std::string best;
  std::vector<size_t> idx(groups.size(), 0);
  std::vector<std::vector<Name>> perm_groups = groups;
  // iterate over the product of group permutations
  std::function<void(size_t, std::vector<Name>&)> rec = [&](size_t gi, std::vector<Name>& acc) {
    if (gi == groups.size()) {
      std::string r = render_with(acc);
      std::string full = "new" + std::to_string(acc.size()) + "." + r;
      if (best.empty() || full < best) best = full;
      return;
    }
    std::vector<Name> g = groups[gi];
    std::sort(g.begin(), g.end());
    do {
      size_t base = acc.size();
      for (auto& b : g) acc.push_back(b);
      rec(gi + 1, acc);
      acc.resize(base);
    } while (std::next_permutation(g.begin(), g.end()));
  };
  std::vector<Name> acc;
  rec(0, acc);
  return best;
}

inline std::string canon_render(const TermP& t, std::map<Name, std::string>& env, int depth) {
  auto tok = [&](const Name& n) {
    auto it = env.find(n);
    return it == env.end() ? n : it->second;
  };
  switch (t->kind) {
    case Term::Nil:
      return "0";
    case Term::Input:
    case Term::Output: {
      // binder of an input opens a fresh singleton layer scope
      std::string head = tok(t->subject) + (t->kind == Term::Input ? "?" : "!");
      if (t->kind == Term::Output) {
        return head + tok(t->name) + "." + canon_layer(t->left, env, depth + 1);
      }
      std::map<Name, std::string> e2 = env;
      e2[t->name] = "\x01i" + std::to_string(depth);
      return head + e2[t->name] + "." + canon_layer(t->left, e2, depth + 1);
    }
    default:
      return canon_layer(t, env, depth);
  }
}

inline std::string canonical_key(const TermP& t) {
  std::map<Name, std::string> env;
  return canon_layer(t, env, 0);
}

inline bool congruent(const TermP& a, const TermP& b) {
  return canonical_key(a) == canonical_key(b);
}

// --- reduction ---------------------------------------------------------------

// All one-step reducts up to congruence. Communication happens between
// parallel prefixes of the top layer (scopes hoisted first).
inline std::vector<TermP> reduce_steps(const TermP& t) {
  Layer l = to_layer(t);
  std::vector<TermP> out;
  std::vector<std::string> seen;
  for (size_t i = 0; i < l.comps.size(); i++) {
    for (size_t j = 0; j < l.comps.size(); j++) {
      if (i == j) continue;
      const TermP& o = l.comps[i];
      const TermP& in = l.comps[j];
      if (o->kind != Term::Output || in->kind != Term::Input) continue;
      if (o->subject != in->subject) continue;
      Layer r;
      r.binders = l.binders;
      for (size_t k = 0; k < l.comps.size(); k++)
        if (k != i && k != j) r.comps.push_back(l.comps[k]);
      r.comps.push_back(o->left);
      r.comps.push_back(substitute(in->left, in->name, o->name));
      TermP red = from_layer(r);
      red = from_layer(to_layer(red));  // re-hoist, drop unused binders
      std::string key = canonical_key(red);
      if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
        seen.push_back(key);
        out.push_back(red);
      }
    }
  }
  return out;
}

// --- parsing / printing -------------------------------------------------------
//
// P ::= '0' | name '!' name '.' A | name '?' name '.' A | A '|' A | 'new' name '.' P | '(' P ')'
// Prefix bodies bind tight; 'new' extends right as far as possible.

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
  bool ident_start(char c) { return isalpha((unsigned char)c) || c == '_'; }
  bool ident_char(char c) { return isalnum((unsigned char)c) || c == '_' || c == '\''; }
  std::optional<Name> ident() {
    ws();
    if (pos >= s.size() || !ident_start(s[pos])) return std::nullopt;
    size_t start = pos;
    while (pos < s.size() && ident_char(s[pos])) pos++;
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
    TermP t = atom();
    while (true) {
      ws();
      if (eat('|')) {
        t = par(t, atom());
      } else {
        break;
      }
    }
    return t;
  }

  TermP atom() {
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
      expect('.');
      return nu(*x, term());
    }
    auto u = ident();
    if (!u) throw parse_error("expected term at offset " + std::to_string(pos));
    ws();
    if (eat('!')) {
      auto x = ident();
      if (!x) throw parse_error("expected object name");
      expect('.');
      return output(*u, *x, atom());
    }
    if (eat('?')) {
      auto x = ident();
      if (!x) throw parse_error("expected binder name");
      expect('.');
      return input(*u, *x, atom());
    }
    throw parse_error("expected '!' or '?' after subject at offset " + std::to_string(pos));
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

inline void print_into(const TermP& t, std::map<Name, Name>& ren, std::set<Name>& taken, std::string& out,
                       bool par_ctx) {
  auto nm = [&](const Name& n) {
    auto it = ren.find(n);
    return it == ren.end() ? n : it->second;
  };
  switch (t->kind) {
    case Term::Nil:
      out += "0";
      return;
    case Term::Par: {
      if (par_ctx) out += "(";
      print_into(t->left, ren, taken, out, true);
      out += " | ";
      print_into(t->right, ren, taken, out, true);
      if (par_ctx) out += ")";
      return;
    }
    case Term::Output: {
      out += nm(t->subject) + "!" + nm(t->name) + ".";
      bool needs = t->left->kind == Term::Par || t->left->kind == Term::Nu;
      if (needs) out += "(";
      print_into(t->left, ren, taken, out, false);
      if (needs) out += ")";
      return;
    }
    case Term::Input:
    case Term::Nu: {
      Name b = t->name;
      bool shadow = ren.count(b);
      Name saved = shadow ? ren[b] : "";
      Name disp = is_generated_name(b) || taken.count(b) ? display_name(b, taken) : b;
      taken.insert(disp);
      ren[b] = disp;
      if (t->kind == Term::Input) {
        out += nm(t->subject) + "?" + disp + ".";
        bool needs = t->left->kind == Term::Par || t->left->kind == Term::Nu;
        if (needs) out += "(";
        print_into(t->left, ren, taken, out, false);
        if (needs) out += ")";
      } else {
        out += "new " + disp + ". ";
        print_into(t->left, ren, taken, out, true);
      }
      if (shadow)
        ren[b] = saved;
      else
        ren.erase(b);
      return;
    }
  }
}

inline std::string print(const TermP& t) {
  std::map<Name, Name> ren;
  std::set<Name> taken = free_names(t);
  std::string out;
  print_into(t, ren, taken, out, false);
  return out;
}

inline int size(const TermP& t) {
  switch (t->kind) {
    case Term::Nil:
      return 1;
    case Term::Par:
      return 1 + size(t->left) + size(t->right);
    case Term::Nu:
    case Term::Input:
    case Term::Output:
      return 1 + size(t->left);
  }
  return 1;
}

}  // namespace solace::pi
