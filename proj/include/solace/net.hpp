#pragma once

#include <array>
#include <cassert>
#include <deque>
#include <functional>
#include <variant>

#include "solace/base.hpp"

namespace solace::din {

// ---------------------------------------------------------------------------
// Types: o, i (= dual o), !o, ?i, with o = ?i par o and i = !o tensor i.
// ---------------------------------------------------------------------------

enum class LinType { O, I, BangO, WhyI };

inline LinType dual(LinType t) {
  switch (t) {
    case LinType::O:
      return LinType::I;
    case LinType::I:
      return LinType::O;
    case LinType::BangO:
      return LinType::WhyI;
    case LinType::WhyI:
      return LinType::BangO;
  }
  return t;
}

inline std::string type_str(LinType t) {
  switch (t) {
    case LinType::O:
      return "o";
    case LinType::I:
      return "i";
    case LinType::BangO:
      return "!o";
    case LinType::WhyI:
      return "?i";
  }
  return "?";
}

inline std::optional<LinType> type_from(const std::string& s) {
  if (s == "o") return LinType::O;
  if (s == "i") return LinType::I;
  if (s == "!o") return LinType::BangO;
  if (s == "?i") return LinType::WhyI;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Cells. Slot 0 is the principal port.
// ---------------------------------------------------------------------------

enum class CellKind { Par, Bottom, Tensor, One, Der, Weak, Contr, Coder, Coweak, Cocontr };

inline int arity(CellKind k) {
  switch (k) {
    case CellKind::Par:
    case CellKind::Tensor:
    case CellKind::Contr:
    case CellKind::Cocontr:
      return 2;
    case CellKind::Der:
    case CellKind::Coder:
      return 1;
    default:
      return 0;
  }
}

inline std::string kind_str(CellKind k) {
  switch (k) {
    case CellKind::Par:
      return "par";
    case CellKind::Bottom:
      return "bottom";
    case CellKind::Tensor:
      return "tensor";
    case CellKind::One:
      return "one";
    case CellKind::Der:
      return "der";
    case CellKind::Weak:
      return "weak";
    case CellKind::Contr:
      return "contr";
    case CellKind::Coder:
      return "coder";
    case CellKind::Coweak:
      return "coweak";
    case CellKind::Cocontr:
      return "cocontr";
  }
  return "?";
}

inline std::optional<CellKind> kind_from(const std::string& s) {
  for (CellKind k : {CellKind::Par, CellKind::Bottom, CellKind::Tensor, CellKind::One, CellKind::Der,
                     CellKind::Weak, CellKind::Contr, CellKind::Coder, CellKind::Coweak, CellKind::Cocontr})
    if (kind_str(k) == s) return k;
  return std::nullopt;
}

// Type provided by the cell on the oriented wire leaving the port.
inline LinType outward(CellKind k, int slot) {
  switch (k) {
    case CellKind::Par:  // o = ?i par o
      return slot == 0 ? LinType::O : (slot == 1 ? LinType::BangO : LinType::I);
    case CellKind::Tensor:  // i = !o tensor i
      return slot == 0 ? LinType::I : (slot == 1 ? LinType::WhyI : LinType::O);
    case CellKind::Bottom:
      return LinType::O;
    case CellKind::One:
      return LinType::I;
    case CellKind::Der:
      return slot == 0 ? LinType::WhyI : LinType::O;
    case CellKind::Weak:
      return LinType::WhyI;
    case CellKind::Contr:
      return slot == 0 ? LinType::WhyI : LinType::BangO;
    case CellKind::Coder:
      return slot == 0 ? LinType::BangO : LinType::I;
    case CellKind::Coweak:
      return LinType::BangO;
    case CellKind::Cocontr:
      return slot == 0 ? LinType::BangO : LinType::WhyI;
  }
  return LinType::O;
}

inline bool why_family(CellKind k) {
  return k == CellKind::Der || k == CellKind::Weak || k == CellKind::Contr;
}
inline bool bang_family(CellKind k) {
  return k == CellKind::Coder || k == CellKind::Coweak || k == CellKind::Cocontr;
}

// ---------------------------------------------------------------------------
// Simple nets
// ---------------------------------------------------------------------------

struct Port {
  int cell;  // >= 0 cell id; -1 free port, index in `slot`
  int slot;
  bool operator==(const Port&) const = default;
  auto operator<=>(const Port&) const = default;
  bool is_free() const { return cell < 0; }
};

struct SimpleNet {
  struct Cell {
    CellKind kind;
    std::string label;  // only der/coder; empty = tau
    std::string tag;    // provenance bookkeeping; ignored by iso and validation
  };
  std::vector<Cell> cells;
  std::vector<std::pair<Port, Port>> wires;
  std::vector<std::string> iface_names;
  std::vector<LinType> iface_types;
  int loops = 0;

  size_t port_count() const {
    size_t n = iface_names.size();
    for (auto& c : cells) n += arity(c.kind) + 1;
    return n;
  }

  std::optional<Port> partner(Port p) const {
    for (auto& [a, b] : wires) {
      if (a == p) return b;
      if (b == p) return a;
    }
    return std::nullopt;
  }

  int cell_by_label(const std::string& l) const {
    for (size_t i = 0; i < cells.size(); i++)
      if (cells[i].label == l) return (int)i;
    return -1;
  }

  void sort_wires() {
    for (auto& [a, b] : wires)
      if (b < a) std::swap(a, b);
    std::sort(wires.begin(), wires.end());
  }
};

struct Interface {
  std::vector<std::string> names;
  std::vector<LinType> types;
  bool operator==(const Interface&) const = default;
};

inline Interface interface_of(const SimpleNet& s) { return {s.iface_names, s.iface_types}; }

// A net is a finite formal sum of simple nets over one interface; the empty
// sum (the 0 net) carries its interface explicitly.
struct Net {
  std::vector<SimpleNet> summands;
  Interface iface;
};

inline Net as_net(SimpleNet s) {
  Net n;
  n.iface = interface_of(s);
  n.summands.push_back(std::move(s));
  return n;
}

// --- validation --------------------------------------------------------------

inline std::vector<std::string> validate(const SimpleNet& s) {
  std::vector<std::string> diags;
  std::map<Port, int> seen;
  for (auto& [a, b] : s.wires) {
    seen[a]++;
    seen[b]++;
    if (a == b) diags.push_back("wire connects a port to itself");
  }
  auto check_port = [&](Port p, const std::string& what) {
    auto it = seen.find(p);
    if (it == seen.end())
      diags.push_back(what + " is not wired");
    else if (it->second > 1)
      diags.push_back(what + " is shared by several wires");
  };
  for (size_t c = 0; c < s.cells.size(); c++) {
    for (int k = 0; k <= arity(s.cells[c].kind); k++)
      check_port({(int)c, k}, "port " + std::to_string(c) + "." + std::to_string(k));
    if (!s.cells[c].label.empty() && s.cells[c].kind != CellKind::Der && s.cells[c].kind != CellKind::Coder)
      diags.push_back("label on a cell that is not a (co)dereliction");
  }
  if (s.iface_names.size() != s.iface_types.size()) diags.push_back("interface names/types mismatch");
  for (size_t f = 0; f < s.iface_names.size(); f++) check_port({-1, (int)f}, "free port " + s.iface_names[f]);
  for (auto& [p, n] : seen) {
    bool known = p.is_free() ? (size_t)p.slot < s.iface_names.size()
                             : (size_t)p.cell < s.cells.size() && p.slot <= arity(s.cells[p.cell].kind);
    if (!known) diags.push_back("wire references unknown port");
  }
  // typing: dual outward types on every cell-cell wire; declared interface
  // types must agree with the cell side of free-cell wires
  for (auto& [a, b] : s.wires) {
    if (!a.is_free() && !b.is_free()) {
      if (outward(s.cells[a.cell].kind, a.slot) != dual(outward(s.cells[b.cell].kind, b.slot)))
        diags.push_back("type clash on wire " + std::to_string(a.cell) + "." + std::to_string(a.slot) + " - " +
                        std::to_string(b.cell) + "." + std::to_string(b.slot));
    } else if (a.is_free() != b.is_free()) {
      Port f = a.is_free() ? a : b;
      Port c = a.is_free() ? b : a;
      if ((size_t)f.slot < s.iface_types.size() && (size_t)c.cell < s.cells.size() &&
          s.iface_types[f.slot] != outward(s.cells[c.cell].kind, c.slot))
        diags.push_back("declared type of free port " + s.iface_names[f.slot] + " clashes with its wire");
    }
  }
  // label distinctness (non-tau)
  std::set<std::string> labels;
  for (auto& c : s.cells)
    if (!c.label.empty() && !labels.insert(c.label).second)
      diags.push_back("duplicate label " + c.label);
  return diags;
}

// --- canonical keys / isomorphism ---------------------------------------------
//
// The aux ports of (co)contraction cells are interchangeable, so both carry
// the same edge tag; everything else is rigid.

inline int port_tag(CellKind k, int slot) {
  if ((k == CellKind::Contr || k == CellKind::Cocontr) && slot > 0) return 1;
  return slot;
}

inline CanonGraph iso_graph(const SimpleNet& s, bool with_tags = false) {
  CanonGraph g;
  std::vector<int> cv;
  for (auto& c : s.cells)
    cv.push_back(g.add_vertex(kind_str(c.kind) + (c.label.empty() ? "" : "@" + c.label) +
                              (with_tags && !c.tag.empty() ? "#" + c.tag : "")));
  std::vector<int> fv;
  for (size_t f = 0; f < s.iface_names.size(); f++)
    fv.push_back(g.add_vertex("F" + std::to_string(f) + ":" + type_str(s.iface_types[f])));
  auto vertex = [&](Port p) { return p.is_free() ? fv[p.slot] : cv[p.cell]; };
  auto tag = [&](Port p) { return p.is_free() ? 0 : port_tag(s.cells[p.cell].kind, p.slot); };
  for (auto& [a, b] : s.wires) g.add_edge(vertex(a), vertex(b), tag(a), tag(b));
  g.set_preamble("loops=" + std::to_string(s.loops));
  return g;
}

inline std::string canonical_key(const SimpleNet& s) { return iso_graph(s).canonical_string(); }
inline std::string canonical_key_tagged(const SimpleNet& s) { return iso_graph(s, true).canonical_string(); }

inline bool net_iso(const SimpleNet& a, const SimpleNet& b) {
  if (a.loops != b.loops) return false;
  if (a.iface_types != b.iface_types) return false;
  if (a.cells.size() != b.cells.size() || a.wires.size() != b.wires.size()) return false;
  return canonical_key(a) == canonical_key(b);
}

inline std::string canonical_key(const Net& n) {
  std::vector<std::string> keys;
  for (auto& s : n.summands) keys.push_back(canonical_key(s));
  std::sort(keys.begin(), keys.end());
  std::string out = "iface:";
  for (auto& t : n.iface.types) out += type_str(t) + ",";
  for (auto& k : keys) out += "\n+" + k;
  return out;
}

inline bool net_iso(const Net& a, const Net& b) { return canonical_key(a) == canonical_key(b); }

// ---------------------------------------------------------------------------
// Builder: compose fragments by soldering ports and plugs; chains of plugs
// dissolve into wires, pure plug cycles become loops.
// ---------------------------------------------------------------------------

class Builder {
 public:
  int add_cell(CellKind k, std::string label = "", std::string tag = "") {
    cells_.push_back({k, std::move(label), std::move(tag)});
    return (int)cells_.size() - 1;
  }

  // a fresh unnamed plug
  int plug() {
    plug_names_.push_back("");
    return (int)plug_names_.size() - 1;
  }

  static Port cellport(int cell, int slot) { return {cell, slot}; }
  Port plugport(int plug) const { return {-2, plug}; }

  void solder(Port a, Port b) { edges_.push_back({a, b}); }
  void solder_cp(int cell, int slot, int plug) { solder(cellport(cell, slot), plugport(plug)); }

  void expose(int plug, const std::string& name, std::optional<LinType> hint = std::nullopt) {
    exposed_.push_back({plug, name, hint});
  }

  // Copy a whole simple net in; free port f of `s` becomes a fresh plug.
  // Returns (cell offset, plug ids per free port).
  std::pair<int, std::vector<int>> merge(const SimpleNet& s) {
    int off = (int)cells_.size();
    for (auto& c : s.cells) cells_.push_back(c);
    std::vector<int> fp;
    for (size_t f = 0; f < s.iface_names.size(); f++) fp.push_back(plug());
    auto conv = [&](Port p) { return p.is_free() ? plugport(fp[p.slot]) : cellport(p.cell + off, p.slot); };
    for (auto& [a, b] : s.wires) solder(conv(a), conv(b));
    loops_ += s.loops;
    return {off, fp};
  }

  SimpleNet finalize() {
    SimpleNet out;
    out.cells = cells_;
    out.loops = loops_;
    std::map<int, int> plug_iface;  // plug -> free index
    for (size_t i = 0; i < exposed_.size(); i++) {
      auto& [p, name, hint] = exposed_[i];
      if (plug_iface.count(p)) throw std::runtime_error("plug exposed twice");
      plug_iface[p] = (int)i;
      out.iface_names.push_back(name);
      out.iface_types.push_back(LinType::O);  // fixed up below
    }
    auto is_terminal = [&](Port p) { return p.cell >= 0 || (p.cell == -2 && plug_iface.count(p.slot)); };
    auto final_port = [&](Port p) -> Port {
      if (p.cell >= 0) return p;
      return {-1, plug_iface.at(p.slot)};
    };
    // adjacency
    std::map<Port, std::vector<size_t>> adj;
    for (size_t e = 0; e < edges_.size(); e++) {
      adj[edges_[e].first].push_back(e);
      adj[edges_[e].second].push_back(e);
    }
    for (auto& [p, es] : adj) {
      size_t want = is_terminal(p) ? 1 : 2;
      if (p.cell == -2 && !plug_iface.count(p.slot)) want = 2;
      if (es.size() != want)
        throw std::runtime_error("builder: port/plug with degree " + std::to_string(es.size()) +
                                 " (want " + std::to_string(want) + ")");
    }
    for (size_t c = 0; c < cells_.size(); c++)
      for (int k = 0; k <= arity(cells_[c].kind); k++)
        if (!adj.count({(int)c, k}))
          throw std::runtime_error("builder: unwired cell port " + std::to_string(c) + "." + std::to_string(k));
    for (auto& [p, name, hint] : exposed_)
      if (!adj.count(plugport(p))) throw std::runtime_error("builder: exposed plug " + name + " unwired");

    std::vector<bool> used(edges_.size(), false);
    auto other = [&](size_t e, Port p) { return edges_[e].first == p ? edges_[e].second : edges_[e].first; };
    // walk from each terminal
    for (auto& [start, es] : adj) {
      if (!is_terminal(start) || used[es[0]]) continue;
      size_t e = es[0];
      Port prev = start;
      while (true) {
        used[e] = true;
        Port next = other(e, prev);
        if (is_terminal(next)) {
          out.wires.push_back({final_port(start), final_port(next)});
          break;
        }
        auto& nes = adj[next];
        e = nes[0] == e ? nes[1] : nes[0];
        prev = next;
      }
    }
    // leftover pure plug cycles
    for (size_t e = 0; e < edges_.size(); e++) {
      if (used[e]) continue;
      out.loops++;
      size_t cur = e;
      Port prev = edges_[e].first;
      while (!used[cur]) {
        used[cur] = true;
        Port next = other(cur, prev);
        auto& nes = adj[next];
        cur = nes[0] == cur ? nes[1] : nes[0];
        prev = next;
      }
    }
    // interface types: derive from the cell side where available
    for (size_t i = 0; i < out.iface_names.size(); i++) {
      Port f{-1, (int)i};
      auto q = out.partner(f);
      if (q && !q->is_free()) {
        out.iface_types[i] = outward(out.cells[q->cell].kind, q->slot);
      } else {
        auto hint = std::get<2>(exposed_[i]);
        if (hint) {
          out.iface_types[i] = *hint;
        } else if (q && q->is_free()) {
          auto hint2 = std::get<2>(exposed_[q->slot]);
          out.iface_types[i] = hint2 ? dual(*hint2) : LinType::O;
        }
      }
    }
    out.sort_wires();
    return out;
  }

 private:
  std::vector<SimpleNet::Cell> cells_;
  std::vector<std::string> plug_names_;
  std::vector<std::pair<Port, Port>> edges_;
  std::vector<std::tuple<int, std::string, std::optional<LinType>>> exposed_;
  int loops_ = 0;
};

// ---------------------------------------------------------------------------
// Redexes and the fourteen-entry rule table
// ---------------------------------------------------------------------------

enum class RuleClass { Multiplicative, Communication, NonDeterministic, Structural };

struct Redex {
  int cell_a, cell_b;  // wired through their principal ports
  RuleClass cls;
};

// Which reductions a closure step may fire. R-reduction (the paper's ~>R) is
// multiplicative + communication over {tau} + structural + non-deterministic
// over R.
struct StepPolicy {
  bool comm_tau = true;
  std::set<std::string> comm_labels;  // extra labels allowed to communicate
  bool nd_tau = false;
  std::set<std::string> nd_labels;

  static StepPolicy reduction_over(const std::set<std::string>& R, bool tau_in_R = false) {
    StepPolicy p;
    p.nd_labels = R;
    p.nd_tau = tau_in_R;
    return p;
  }
  static StepPolicy deterministic() { return reduction_over({}); }  // ~>d
  static StepPolicy tau_full() { return reduction_over({}, true); }  // ~>{tau}
};

inline std::optional<RuleClass> classify(CellKind a, CellKind b) {
  auto pair_is = [&](CellKind x, CellKind y) { return (a == x && b == y) || (a == y && b == x); };
  if (pair_is(CellKind::Par, CellKind::Tensor) || pair_is(CellKind::Bottom, CellKind::One) ||
      pair_is(CellKind::Par, CellKind::One) || pair_is(CellKind::Tensor, CellKind::Bottom))
    return RuleClass::Multiplicative;
  if (pair_is(CellKind::Der, CellKind::Coder)) return RuleClass::Communication;
  if (pair_is(CellKind::Der, CellKind::Cocontr) || pair_is(CellKind::Coder, CellKind::Contr) ||
      pair_is(CellKind::Der, CellKind::Coweak) || pair_is(CellKind::Coder, CellKind::Weak))
    return RuleClass::NonDeterministic;
  if (pair_is(CellKind::Contr, CellKind::Coweak) || pair_is(CellKind::Cocontr, CellKind::Weak) ||
      pair_is(CellKind::Weak, CellKind::Coweak) || pair_is(CellKind::Contr, CellKind::Cocontr))
    return RuleClass::Structural;
  return std::nullopt;  // typing forbids the remaining pairs
}

// All principal-principal cell pairs; enablement is checked separately.
inline std::vector<Redex> find_redexes(const SimpleNet& s) {
  std::vector<Redex> out;
  for (auto& [a, b] : s.wires) {
    if (a.is_free() || b.is_free() || a.slot != 0 || b.slot != 0) continue;
    auto cls = classify(s.cells[a.cell].kind, s.cells[b.cell].kind);
    if (cls) out.push_back({a.cell, b.cell, *cls});
  }
  return out;
}

inline bool enabled(const SimpleNet& s, const Redex& r, const StepPolicy& pol) {
  auto label_ok_comm = [&](const std::string& l) {
    return l.empty() ? pol.comm_tau : pol.comm_labels.count(l) > 0;
  };
  switch (r.cls) {
    case RuleClass::Multiplicative:
    case RuleClass::Structural:
      return true;
    case RuleClass::Communication:
      return label_ok_comm(s.cells[r.cell_a].label) && label_ok_comm(s.cells[r.cell_b].label);
    case RuleClass::NonDeterministic: {
      CellKind ka = s.cells[r.cell_a].kind;
      const std::string& l = (ka == CellKind::Der || ka == CellKind::Coder) ? s.cells[r.cell_a].label
                                                                            : s.cells[r.cell_b].label;
      return l.empty() ? pol.nd_tau : pol.nd_labels.count(l) > 0;
    }
  }
  return false;
}

// --- rule application -----------------------------------------------------------

namespace detail {

// Skeleton builder for one RHS summand: survivors copied, redex ports turned
// into plugs for the rule body to solder.
struct RewriteFrame {
  Builder b;
  std::map<int, int> cellmap;                 // old cell -> new cell
  std::map<std::pair<int, int>, int> stubs;   // (old redex cell, slot) -> plug

  RewriteFrame(const SimpleNet& s, int c1, int c2) {
    for (size_t c = 0; c < s.cells.size(); c++)
      if ((int)c != c1 && (int)c != c2)
        cellmap[(int)c] = b.add_cell(s.cells[c].kind, s.cells[c].label, s.cells[c].tag);
    std::vector<int> iface_plugs;
    for (size_t f = 0; f < s.iface_names.size(); f++) {
      int p = b.plug();
      iface_plugs.push_back(p);
      b.expose(p, s.iface_names[f], s.iface_types[f]);
    }
    auto endpoint = [&](Port p) -> Port {
      if (p.is_free()) return b.plugport(iface_plugs[p.slot]);
      if (p.cell == c1 || p.cell == c2) {
        auto key = std::make_pair(p.cell, p.slot);
        auto it = stubs.find(key);
        if (it == stubs.end()) it = stubs.emplace(key, b.plug()).first;
        return b.plugport(it->second);
      }
      return Builder::cellport(cellmap[p.cell], p.slot);
    };
    for (auto& [x, y] : s.wires) {
      // the principal-principal wire is consumed by the rule
      if ((x == Port{c1, 0} && y == Port{c2, 0}) || (x == Port{c2, 0} && y == Port{c1, 0})) continue;
      b.solder(endpoint(x), endpoint(y));
    }
  }

  Port stub(int old_cell, int slot) { return b.plugport(stubs.at({old_cell, slot})); }
};

}  // namespace detail

// Fire a redex; the result has the same interface as the host net.
inline Net apply_rule(const SimpleNet& s, const Redex& r) {
  using detail::RewriteFrame;
  int A = r.cell_a, B = r.cell_b;
  CellKind ka = s.cells[A].kind, kb = s.cells[B].kind;
  auto ordered = [&](CellKind first) {
    return s.cells[A].kind == first ? std::make_pair(A, B) : std::make_pair(B, A);
  };
  Net result;
  result.iface = interface_of(s);
  int base_loops = s.loops;
  auto one_summand = [&](const std::function<void(RewriteFrame&)>& body) {
    RewriteFrame f(s, A, B);
    body(f);
    SimpleNet t = f.b.finalize();
    t.loops += 0;  // builder already counted merged loops
    t.loops += base_loops;
    result.summands.push_back(std::move(t));
  };
  auto pair_is = [&](CellKind x, CellKind y) { return (ka == x && kb == y) || (ka == y && kb == x); };

  if (pair_is(CellKind::Par, CellKind::Tensor)) {
    auto [par, ten] = ordered(CellKind::Par);
    one_summand([&](RewriteFrame& f) {
      f.b.solder(f.stub(par, 1), f.stub(ten, 1));
      f.b.solder(f.stub(par, 2), f.stub(ten, 2));
    });
  } else if (pair_is(CellKind::Bottom, CellKind::One) || pair_is(CellKind::Weak, CellKind::Coweak)) {
    one_summand([](RewriteFrame&) {});
  } else if (pair_is(CellKind::Par, CellKind::One)) {
    auto [par, one] = ordered(CellKind::Par);
    (void)one;
    one_summand([&](RewriteFrame& f) {
      int cw = f.b.add_cell(CellKind::Coweak, "", s.cells[par].tag);
      f.b.solder(Builder::cellport(cw, 0), f.stub(par, 1));
      int o = f.b.add_cell(CellKind::One, "", s.cells[par].tag);
      f.b.solder(Builder::cellport(o, 0), f.stub(par, 2));
    });
  } else if (pair_is(CellKind::Tensor, CellKind::Bottom)) {
    auto [ten, bot] = ordered(CellKind::Tensor);
    (void)bot;
    one_summand([&](RewriteFrame& f) {
      int w = f.b.add_cell(CellKind::Weak, "", s.cells[ten].tag);
      f.b.solder(Builder::cellport(w, 0), f.stub(ten, 1));
      int bt = f.b.add_cell(CellKind::Bottom, "", s.cells[ten].tag);
      f.b.solder(Builder::cellport(bt, 0), f.stub(ten, 2));
    });
  } else if (pair_is(CellKind::Der, CellKind::Coder)) {
    auto [der, coder] = ordered(CellKind::Der);
    one_summand([&](RewriteFrame& f) { f.b.solder(f.stub(der, 1), f.stub(coder, 1)); });
  } else if (pair_is(CellKind::Der, CellKind::Cocontr) || pair_is(CellKind::Coder, CellKind::Contr)) {
    bool der_side = pair_is(CellKind::Der, CellKind::Cocontr);
    auto [d, cc] = ordered(der_side ? CellKind::Der : CellKind::Coder);
    CellKind dkind = der_side ? CellKind::Der : CellKind::Coder;
    CellKind wkind = der_side ? CellKind::Weak : CellKind::Coweak;
    for (int branch = 1; branch <= 2; branch++) {
      one_summand([&](RewriteFrame& f) {
        int nd = f.b.add_cell(dkind, s.cells[d].label, s.cells[d].tag);
        f.b.solder(Builder::cellport(nd, 0), f.stub(cc, branch));
        f.b.solder(Builder::cellport(nd, 1), f.stub(d, 1));
        int nw = f.b.add_cell(wkind, "", s.cells[cc].tag);
        f.b.solder(Builder::cellport(nw, 0), f.stub(cc, branch == 1 ? 2 : 1));
      });
    }
  } else if (pair_is(CellKind::Der, CellKind::Coweak) || pair_is(CellKind::Coder, CellKind::Weak)) {
    // erases the whole simple net: 0 net with the ambient interface
  } else if (pair_is(CellKind::Contr, CellKind::Coweak) || pair_is(CellKind::Cocontr, CellKind::Weak)) {
    bool contr_side = pair_is(CellKind::Contr, CellKind::Coweak);
    auto [c, w] = ordered(contr_side ? CellKind::Contr : CellKind::Cocontr);
    CellKind nk = contr_side ? CellKind::Coweak : CellKind::Weak;
    one_summand([&](RewriteFrame& f) {
      for (int k = 1; k <= 2; k++) {
        int nw = f.b.add_cell(nk, "", s.cells[w].tag);
        f.b.solder(Builder::cellport(nw, 0), f.stub(c, k));
      }
    });
  } else if (pair_is(CellKind::Contr, CellKind::Cocontr)) {
    auto [c, k] = ordered(CellKind::Contr);
    one_summand([&](RewriteFrame& f) {
      int K1 = f.b.add_cell(CellKind::Cocontr, "", s.cells[k].tag);
      int K2 = f.b.add_cell(CellKind::Cocontr, "", s.cells[k].tag);
      int C1 = f.b.add_cell(CellKind::Contr, "", s.cells[c].tag);
      int C2 = f.b.add_cell(CellKind::Contr, "", s.cells[c].tag);
      f.b.solder(Builder::cellport(K1, 0), f.stub(c, 1));
      f.b.solder(Builder::cellport(K2, 0), f.stub(c, 2));
      f.b.solder(Builder::cellport(C1, 0), f.stub(k, 1));
      f.b.solder(Builder::cellport(C2, 0), f.stub(k, 2));
      f.b.solder(Builder::cellport(K1, 1), Builder::cellport(C1, 1));
      f.b.solder(Builder::cellport(K1, 2), Builder::cellport(C2, 1));
      f.b.solder(Builder::cellport(K2, 1), Builder::cellport(C1, 2));
      f.b.solder(Builder::cellport(K2, 2), Builder::cellport(C2, 2));
    });
  } else {
    throw std::runtime_error("apply_rule: not a redex pair");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Closures and equivalences
// ---------------------------------------------------------------------------

struct ClosureResult {
  std::vector<Net> reachable;  // includes the start
  bool exhausted = false;      // depth ran out with work pending
};

// Breadth-first closure of a net under single-summand steps of the policy.
inline ClosureResult reduce_closure(const Net& start, const StepPolicy& pol, int depth,
                                    size_t max_states = 20000) {
  ClosureResult res;
  std::map<std::string, Net> seen;
  std::deque<std::pair<Net, int>> q;
  seen.emplace(canonical_key(start), start);
  q.push_back({start, 0});
  while (!q.empty()) {
    auto [n, d] = q.front();
    q.pop_front();
    res.reachable.push_back(n);
    if (d >= depth) {
      bool pending = false;
      for (auto& s : n.summands)
        for (auto& r : find_redexes(s))
          if (enabled(s, r, pol)) pending = true;
      if (pending) res.exhausted = true;
      continue;
    }
    for (size_t i = 0; i < n.summands.size(); i++) {
      for (auto& r : find_redexes(n.summands[i])) {
        if (!enabled(n.summands[i], r, pol)) continue;
        Net next;
        next.iface = n.iface;
        for (size_t j = 0; j < n.summands.size(); j++)
          if (j != i) next.summands.push_back(n.summands[j]);
        for (auto& t : apply_rule(n.summands[i], r).summands) next.summands.push_back(t);
        auto key = canonical_key(next);
        if (seen.count(key)) continue;
        seen.emplace(key, next);
        if (seen.size() > max_states) {
          res.exhausted = true;
          return res;
        }
        q.push_back({next, d + 1});
      }
    }
  }
  return res;
}

// Normal form under a policy when the closure terminates; confluence makes it
// unique when it exists.
inline std::optional<Net> normal_form(const Net& start, const StepPolicy& pol, int max_steps = 10000) {
  Net cur = start;
  for (int step = 0; step < max_steps; step++) {
    bool fired = false;
    for (size_t i = 0; i < cur.summands.size() && !fired; i++) {
      for (auto& r : find_redexes(cur.summands[i])) {
        if (!enabled(cur.summands[i], r, pol)) continue;
        Net next;
        next.iface = cur.iface;
        for (size_t j = 0; j < cur.summands.size(); j++)
          if (j != i) next.summands.push_back(cur.summands[j]);
        for (auto& t : apply_rule(cur.summands[i], r).summands) next.summands.push_back(t);
        cur = std::move(next);
        fired = true;
        break;
      }
    }
    if (!fired) return cur;
  }
  return std::nullopt;
}

// ~>d keeps simple nets simple; closure over simple nets.
inline std::map<std::string, SimpleNet> d_closure(const SimpleNet& s, int depth, bool* exhausted = nullptr,
                                                  size_t max_states = 5000) {
  StepPolicy pol = StepPolicy::deterministic();
  std::map<std::string, SimpleNet> seen;
  std::deque<std::pair<SimpleNet, int>> q;
  seen.emplace(canonical_key(s), s);
  q.push_back({s, 0});
  while (!q.empty()) {
    auto [n, d] = q.front();
    q.pop_front();
    if (d >= depth) {
      if (exhausted)
        for (auto& r : find_redexes(n))
          if (enabled(n, r, pol)) *exhausted = true;
      continue;
    }
    for (auto& r : find_redexes(n)) {
      if (!enabled(n, r, pol)) continue;
      Net out = apply_rule(n, r);
      assert(out.summands.size() == 1);
      auto key = canonical_key(out.summands[0]);
      if (seen.count(key)) continue;
      seen.emplace(key, out.summands[0]);
      if (seen.size() > max_states) {
        if (exhausted) *exhausted = true;
        return seen;
      }
      q.push_back({out.summands[0], d + 1});
    }
  }
  return seen;
}

enum class SimResult { Equivalent, Unknown };

// a ~d b via joinability (sound and, by Church-Rosser, complete up to depth).
inline SimResult sim_d(const SimpleNet& a, const SimpleNet& b, int depth) {
  if (interface_of(a).types != interface_of(b).types) return SimResult::Unknown;
  if (canonical_key(a) == canonical_key(b)) return SimResult::Equivalent;
  auto ca = d_closure(a, depth);
  auto cb = d_closure(b, depth);
  for (auto& [k, n] : ca)
    if (cb.count(k)) return SimResult::Equivalent;
  return SimResult::Unknown;
}

// ---------------------------------------------------------------------------
// The transition system D_L
// ---------------------------------------------------------------------------

struct LtsResult {
  std::vector<SimpleNet> reducts;
  bool exhausted = false;
};

// s --(l,m)--> t: search s ~>*_{l,m} for a summand with the codereliction l
// facing the dereliction m, then fire that redex. Search restricted to the
// non-deterministic steps that involve those two cells (the paper's pruning
// remark); complete for translation images.
inline LtsResult din_lts_transition(const SimpleNet& s, const std::string& l, const std::string& m, int depth) {
  assert(!l.empty() && !m.empty() && l != m);
  LtsResult res;
  std::map<std::string, SimpleNet> seen;
  std::set<std::string> result_keys;
  std::deque<std::pair<SimpleNet, int>> q;
  seen.emplace(canonical_key_tagged(s), s);
  q.push_back({s, 0});
  while (!q.empty()) {
    auto [n, d] = q.front();
    q.pop_front();
    int lc = n.cell_by_label(l), mc = n.cell_by_label(m);
    if (lc < 0 || mc < 0) continue;  // a branch erased one of them
    if (n.cells[lc].kind != CellKind::Coder || n.cells[mc].kind != CellKind::Der) continue;
    for (auto& r : find_redexes(n)) {
      bool involves = r.cell_a == lc || r.cell_b == lc || r.cell_a == mc || r.cell_b == mc;
      if (!involves) continue;
      if (r.cls == RuleClass::Communication) {
        bool is_lm = (r.cell_a == lc && r.cell_b == mc) || (r.cell_a == mc && r.cell_b == lc);
        if (!is_lm) continue;  // distinct labels never pair otherwise
        Net out = apply_rule(n, r);
        assert(out.summands.size() == 1);
        auto key = canonical_key(out.summands[0]);
        if (result_keys.insert(key).second) res.reducts.push_back(out.summands[0]);
        continue;
      }
      if (r.cls != RuleClass::NonDeterministic) continue;
      if (d >= depth) {
        res.exhausted = true;
        continue;
      }
      for (auto& t : apply_rule(n, r).summands) {
        auto key = canonical_key_tagged(t);
        if (seen.count(key)) continue;
        seen.emplace(key, t);
        q.push_back({t, d + 1});
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Line format and DOT
// ---------------------------------------------------------------------------

inline std::string port_str(const SimpleNet& s, Port p) {
  if (p.is_free()) return s.iface_names[p.slot];
  return "c" + std::to_string(p.cell) + "." + std::to_string(p.slot);
}

inline std::string to_text(const SimpleNet& s) {
  std::ostringstream os;
  for (size_t c = 0; c < s.cells.size(); c++) {
    os << "cell c" << c << " " << kind_str(s.cells[c].kind);
    if (!s.cells[c].label.empty()) os << " " << s.cells[c].label;
    os << "\n";
  }
  auto ws = s;
  ws.sort_wires();
  std::vector<std::string> lines;
  for (auto& [a, b] : ws.wires) {
    std::string sa = port_str(s, a), sb = port_str(s, b);
    if (sb < sa) std::swap(sa, sb);
    lines.push_back("wire " + sa + " " + sb);
  }
  std::sort(lines.begin(), lines.end());
  for (auto& l : lines) os << l << "\n";
  os << "loops " << s.loops << "\n";
  os << "interface";
  for (size_t f = 0; f < s.iface_names.size(); f++)
    os << " " << s.iface_names[f] << ":" << type_str(s.iface_types[f]);
  os << "\n";
  return os.str();
}

inline SimpleNet from_text(const std::string& text) {
  SimpleNet s;
  std::istringstream is(text);
  std::string line;
  std::vector<std::pair<std::string, std::string>> wire_lines;
  std::map<std::string, int> free_idx;
  while (std::getline(is, line)) {
    auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks[0] == "cell") {
      if (toks.size() < 3 || toks[1][0] != 'c') throw parse_error("bad cell line: " + line);
      size_t id = std::stoul(toks[1].substr(1));
      if (id != s.cells.size()) throw parse_error("cell ids must be dense and ordered: " + line);
      auto k = kind_from(toks[2]);
      if (!k) throw parse_error("unknown cell symbol: " + toks[2]);
      s.cells.push_back({*k, toks.size() > 3 ? toks[3] : ""});
    } else if (toks[0] == "wire") {
      if (toks.size() != 3) throw parse_error("bad wire line: " + line);
      wire_lines.push_back({toks[1], toks[2]});
    } else if (toks[0] == "loops") {
      if (toks.size() != 2) throw parse_error("bad loops line: " + line);
      s.loops = std::stoi(toks[1]);
    } else if (toks[0] == "interface") {
      for (size_t i = 1; i < toks.size(); i++) {
        auto colon = toks[i].rfind(':');
        if (colon == std::string::npos) throw parse_error("bad interface entry: " + toks[i]);
        auto ty = type_from(toks[i].substr(colon + 1));
        if (!ty) throw parse_error("bad interface type: " + toks[i]);
        free_idx[toks[i].substr(0, colon)] = (int)s.iface_names.size();
        s.iface_names.push_back(toks[i].substr(0, colon));
        s.iface_types.push_back(*ty);
      }
    } else {
      throw parse_error("unknown net directive: " + toks[0]);
    }
  }
  auto parse_port = [&](const std::string& t) -> Port {
    if (t.size() > 1 && t[0] == 'c' && isdigit((unsigned char)t[1])) {
      auto dot = t.find('.');
      if (dot != std::string::npos) {
        int cell = std::stoi(t.substr(1, dot - 1));
        int slot = std::stoi(t.substr(dot + 1));
        return {cell, slot};
      }
    }
    auto it = free_idx.find(t);
    if (it == free_idx.end()) throw parse_error("unknown free port: " + t);
    return {-1, it->second};
  };
  for (auto& [a, b] : wire_lines) s.wires.push_back({parse_port(a), parse_port(b)});
  s.sort_wires();
  auto diags = validate(s);
  if (!diags.empty()) throw parse_error("invalid net: " + diags[0]);
  return s;
}

// Paper drawing style: triangles with the principal at a corner and a dot on
// auxiliary port 1.
inline std::string to_dot(const SimpleNet& s) {
  std::ostringstream os;
  os << "graph din {\n  node [shape=triangle];\n";
  const char* sym[] = {"&#8904;", "&#8869;", "&#8855;", "1", "?d", "?w", "?c", "!d", "!w", "!c"};
  for (size_t c = 0; c < s.cells.size(); c++) {
    os << "  c" << c << " [label=\"" << sym[(int)s.cells[c].kind];
    if (!s.cells[c].label.empty()) os << " " << s.cells[c].label;
    os << "\"];\n";
  }
  for (size_t f = 0; f < s.iface_names.size(); f++)
    os << "  f" << f << " [shape=plaintext, label=\"" << s.iface_names[f] << ":"
       << type_str(s.iface_types[f]) << "\"];\n";
  auto nm = [&](Port p) {
    return p.is_free() ? "f" + std::to_string(p.slot) : "c" + std::to_string(p.cell);
  };
  for (auto& [a, b] : s.wires) {
    os << "  " << nm(a) << " -- " << nm(b) << " [";
    auto lab = [&](Port p) {
      if (p.is_free()) return std::string();
      if (p.slot == 0) return std::string("p");
      std::string l = std::to_string(p.slot);
      if (p.slot == 1) l += "\xE2\x80\xA2";  // dot marks auxiliary port 1
      return l;
    };
    os << "taillabel=\"" << lab(a) << "\", headlabel=\"" << lab(b) << "\"];\n";
  }
  for (int i = 0; i < s.loops; i++) os << "  loop" << i << " [shape=circle, label=\"o\"];\n";
  os << "}\n";
  return os.str();
}

inline std::string to_text(const Net& n) {
  std::ostringstream os;
  os << "net " << n.summands.size() << " summands\n";
  os << "interface";
  for (size_t f = 0; f < n.iface.names.size(); f++)
    os << " " << n.iface.names[f] << ":" << type_str(n.iface.types[f]);
  os << "\n";
  for (size_t i = 0; i < n.summands.size(); i++) {
    os << "--- summand " << i << "\n" << to_text(n.summands[i]);
  }
  return os.str();
}

}  // namespace solace::din
