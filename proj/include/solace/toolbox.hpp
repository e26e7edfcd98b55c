#pragma once

#include "solace/net.hpp"

namespace solace::toolbox {

using namespace din;

// ---------------------------------------------------------------------------
// Generalized (co)contraction cells.
//
// Canonical shape is a left comb with the direct wire as right child:
//   arity 0 = weakening, arity 1 = wire, arity n+1 = cell over (comb n, wire).
// Free ports: "p" (principal) then "s1".."sn".
// ---------------------------------------------------------------------------

inline SimpleNet gen_contraction(int ar, bool co) {
  Builder b;
  LinType principal_t = co ? LinType::BangO : LinType::WhyI;
  CellKind two = co ? CellKind::Cocontr : CellKind::Contr;
  CellKind zero = co ? CellKind::Coweak : CellKind::Weak;
  std::vector<int> slot_plugs;
  int pp = b.plug();
  if (ar == 0) {
    int c = b.add_cell(zero);
    b.solder_cp(c, 0, pp);
  } else if (ar == 1) {
    int sp = b.plug();
    b.solder(b.plugport(pp), b.plugport(sp));
    slot_plugs.push_back(sp);
  } else {
    // chain of ar-1 cells; cell k's aux2 is slot k+1, the deepest aux1 is slot 1
    std::vector<int> cells;
    for (int k = 0; k < ar - 1; k++) cells.push_back(b.add_cell(two));
    for (int k = 0; k + 1 < ar - 1; k++) b.solder(Builder::cellport(cells[k], 1), Builder::cellport(cells[k + 1], 0));
    b.solder_cp(cells[0], 0, pp);
    int s1 = b.plug();
    b.solder_cp(cells[ar - 2], 1, s1);
    slot_plugs.push_back(s1);
    for (int k = ar - 2; k >= 0; k--) {
      int sp = b.plug();
      b.solder_cp(cells[k], 2, sp);
      slot_plugs.push_back(sp);
    }
  }
  b.expose(pp, "p", principal_t);
  for (size_t i = 0; i < slot_plugs.size(); i++)
    b.expose(slot_plugs[i], "s" + std::to_string(i + 1), dual(principal_t));
  return b.finalize();
}

// A non-canonical variant (right comb padded with a weakening) used to check
// that area behavior does not depend on the chosen shapes.
inline SimpleNet gen_contraction_alt(int ar, bool co) {
  if (ar < 2) return gen_contraction(ar, co);
  Builder b;
  LinType principal_t = co ? LinType::BangO : LinType::WhyI;
  CellKind two = co ? CellKind::Cocontr : CellKind::Contr;
  CellKind zero = co ? CellKind::Coweak : CellKind::Weak;
  // root(wire, root2(weak, comb...)): same arity, different tree
  std::vector<int> cells;
  for (int k = 0; k < ar; k++) cells.push_back(b.add_cell(two));
  for (int k = 0; k + 1 < ar; k++) b.solder(Builder::cellport(cells[k], 2), Builder::cellport(cells[k + 1], 0));
  int w = b.add_cell(zero);
  b.solder(Builder::cellport(cells[ar - 1], 2), Builder::cellport(w, 0));
  int pp = b.plug();
  b.solder_cp(cells[0], 0, pp);
  b.expose(pp, "p", principal_t);
  for (int k = 0; k < ar; k++) {
    int sp = b.plug();
    b.solder_cp(cells[k], 1, sp);
    b.expose(sp, "s" + std::to_string(k + 1), dual(principal_t));
  }
  return b.finalize();
}

// ---------------------------------------------------------------------------
// Prefix cells: the n-ary input cell is rooted in a codereliction/par chain,
// the output cell dually in a dereliction/tensor chain; each object position
// contributes one pair of auxiliary ports (d+i toward p+, d-i toward p-) via
// an unlabeled opposite compound plugged at every second link.
// Free ports: "p", then "d+1","d-1",...,"d+n","d-n".
// ---------------------------------------------------------------------------

inline SimpleNet prefix_cell(bool is_input, int n, const std::string& label) {
  Builder b;
  if (is_input) {
    int coder = b.add_cell(CellKind::Coder, label);
    int pp = b.plug();
    b.solder_cp(coder, 0, pp);
    b.expose(pp, "p", LinType::BangO);
    std::vector<int> pars;
    for (int k = 0; k < 2 * n; k++) pars.push_back(b.add_cell(CellKind::Par));
    int bot = b.add_cell(CellKind::Bottom);
    Port chain = Builder::cellport(coder, 1);
    for (int k = 0; k < 2 * n; k++) {
      b.solder(chain, Builder::cellport(pars[k], 0));
      chain = Builder::cellport(pars[k], 2);
    }
    b.solder(chain, Builder::cellport(bot, 0));
    for (int i = 0; i < n; i++) {
      // odd slot: free ?i-acceptor (wires to p-); even slot: unlabeled
      // dereliction-tensor compound whose free slot accepts !o (wires to p+)
      int dminus = b.plug();
      b.solder_cp(pars[2 * i], 1, dminus);
      int der = b.add_cell(CellKind::Der);
      int ten = b.add_cell(CellKind::Tensor);
      int one = b.add_cell(CellKind::One);
      b.solder(Builder::cellport(pars[2 * i + 1], 1), Builder::cellport(der, 0));
      b.solder(Builder::cellport(der, 1), Builder::cellport(ten, 0));
      b.solder(Builder::cellport(ten, 2), Builder::cellport(one, 0));
      int dplus = b.plug();
      b.solder_cp(ten, 1, dplus);
      b.expose(dplus, "d+" + std::to_string(i + 1), LinType::WhyI);
      b.expose(dminus, "d-" + std::to_string(i + 1), LinType::BangO);
    }
  } else {
    int der = b.add_cell(CellKind::Der, label);
    int pp = b.plug();
    b.solder_cp(der, 0, pp);
    b.expose(pp, "p", LinType::WhyI);
    std::vector<int> tens;
    for (int k = 0; k < 2 * n; k++) tens.push_back(b.add_cell(CellKind::Tensor));
    int one = b.add_cell(CellKind::One);
    Port chain = Builder::cellport(der, 1);
    for (int k = 0; k < 2 * n; k++) {
      b.solder(chain, Builder::cellport(tens[k], 0));
      chain = Builder::cellport(tens[k], 2);
    }
    b.solder(chain, Builder::cellport(one, 0));
    for (int i = 0; i < n; i++) {
      int dplus = b.plug();
      b.solder_cp(tens[2 * i], 1, dplus);
      int coder = b.add_cell(CellKind::Coder);
      int par = b.add_cell(CellKind::Par);
      int bot = b.add_cell(CellKind::Bottom);
      b.solder(Builder::cellport(tens[2 * i + 1], 1), Builder::cellport(coder, 0));
      b.solder(Builder::cellport(coder, 1), Builder::cellport(par, 0));
      b.solder(Builder::cellport(par, 2), Builder::cellport(bot, 0));
      int dminus = b.plug();
      b.solder_cp(par, 1, dminus);
      b.expose(dplus, "d+" + std::to_string(i + 1), LinType::WhyI);
      b.expose(dminus, "d-" + std::to_string(i + 1), LinType::BangO);
    }
  }
  return b.finalize();
}

// ---------------------------------------------------------------------------
// Communication areas
// ---------------------------------------------------------------------------

struct AreaHandle {
  int order;
  // interface indices of (p+, p-) per pair
  std::vector<std::pair<int, int>> pairs;
};

// order >= -2; built from the given generalized-cell factory (canonical by
// default). Free ports "p+1","p-1",...  Pair (i,j), i<j: slot j-1 of gamma+_i
// wires to slot i of gamma-_j, and dually.
inline std::pair<SimpleNet, AreaHandle> comm_area_with(
    int order, const std::function<SimpleNet(int, bool)>& factory) {
  AreaHandle h{order, {}};
  if (order == -2) return {SimpleNet{}, h};
  int npairs = order + 2;
  Builder b;
  // plugs of each generalized cell: [0] = principal, [k] = slot k
  std::vector<std::vector<int>> plus(npairs), minus(npairs);
  for (int i = 0; i < npairs; i++) {
    auto [coff, cp] = b.merge(factory(order + 1, true));
    (void)coff;
    plus[i] = cp;
    auto [doff, dp] = b.merge(factory(order + 1, false));
    (void)doff;
    minus[i] = dp;
  }
  for (int i = 1; i <= npairs; i++) {
    for (int j = i + 1; j <= npairs; j++) {
      b.solder(b.plugport(plus[i - 1][j - 1]), b.plugport(minus[j - 1][i]));
      b.solder(b.plugport(minus[i - 1][j - 1]), b.plugport(plus[j - 1][i]));
    }
  }
  for (int i = 0; i < npairs; i++) {
    b.expose(plus[i][0], "p+" + std::to_string(i + 1), LinType::BangO);
    b.expose(minus[i][0], "p-" + std::to_string(i + 1), LinType::WhyI);
    h.pairs.push_back({2 * i, 2 * i + 1});
  }
  return {b.finalize(), h};
}

inline std::pair<SimpleNet, AreaHandle> comm_area(int order) {
  return comm_area_with(order, [](int ar, bool co) { return gen_contraction(ar, co); });
}

// ---------------------------------------------------------------------------
// Area recognizer: does `s` consist exactly of a communication area whose
// pair ports are the given interface indices? Generalized cells of any shape
// (combs, weakening-padded trees, bare wires) are accepted.
// ---------------------------------------------------------------------------

namespace detail {

struct Tree {
  bool bang;              // cocontraction family
  std::vector<int> cells;  // member cell ids
  std::vector<Port> leaves;  // ports *facing* the leaf slots (cross ends)
};

// Collect the maximal same-family tree hanging from `root_port` (the port
// facing the tree's principal). Returns nullopt on structural mismatch.
inline std::optional<Tree> collect_tree(const SimpleNet& s, Port facing_principal,
                                        std::set<int>& claimed) {
  auto part = s.partner(facing_principal);
  if (!part) return std::nullopt;
  Tree t;
  if (part->is_free()) {  // bare wire tree: single leaf is the far free port
    t.bang = false;       // polarity fixed later by caller
    t.leaves.push_back(*part);
    return t;
  }
  CellKind k0 = s.cells[part->cell].kind;
  if (part->slot != 0) {
    // wire tree ending on an opposite tree's aux slot
    t.leaves.push_back(*part);
    return t;
  }
  bool bang = bang_family(k0);
  if (!bang && !why_family(k0)) return std::nullopt;
  t.bang = bang;
  std::function<bool(int)> walk = [&](int cell) -> bool {
    if (claimed.count(cell)) return false;
    CellKind k = s.cells[cell].kind;
    if (bang ? !bang_family(k) : !why_family(k)) return false;
    if (k == CellKind::Der || k == CellKind::Coder) return false;
    claimed.insert(cell);
    t.cells.push_back(cell);
    for (int slot = 1; slot <= arity(k); slot++) {
      auto q = s.partner({cell, slot});
      if (!q) return false;
      if (!q->is_free() && q->slot == 0 && (bang ? bang_family(s.cells[q->cell].kind) : why_family(s.cells[q->cell].kind)) &&
          s.cells[q->cell].kind != CellKind::Der && s.cells[q->cell].kind != CellKind::Coder) {
        if (!walk(q->cell)) return false;
      } else {
        t.leaves.push_back({cell, slot});  // leaf slot; cross end is its partner
      }
    }
    return true;
  };
  if (!walk(part->cell)) return std::nullopt;
  // resolve leaves to the ports facing them
  std::vector<Port> facing;
  for (auto& lp : t.leaves) {
    if (lp.cell >= 0 && claimed.count(lp.cell) && lp.slot >= 1 &&
        (bang ? bang_family(s.cells[lp.cell].kind) : why_family(s.cells[lp.cell].kind))) {
      auto q = s.partner(lp);
      if (!q) return std::nullopt;
      facing.push_back(*q);
    } else {
      facing.push_back(lp);
    }
  }
  t.leaves = facing;
  return t;
}

}  // namespace detail

// pair_ports: interface indices of (p+, p-) per pair.
inline bool recognize_area(const SimpleNet& s, const std::vector<std::pair<int, int>>& pair_ports,
                           std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  size_t npairs = pair_ports.size();
  std::set<int> pair_iface;
  for (auto& [a, b] : pair_ports) {
    pair_iface.insert(a);
    pair_iface.insert(b);
  }
  if (pair_iface.size() != 2 * npairs) return fail("pair ports not distinct");
  if (s.iface_names.size() != 2 * npairs) return fail("extra interface ports");
  for (auto& c : s.cells)
    if (!(c.kind == CellKind::Contr || c.kind == CellKind::Weak || c.kind == CellKind::Cocontr ||
          c.kind == CellKind::Coweak))
      return fail("non-structural cell present");
  if (npairs == 0) return s.cells.empty() && s.wires.empty() ? true : fail("expected the empty net");

  std::set<int> claimed;
  std::vector<detail::Tree> plus(npairs), minus(npairs);
  for (size_t i = 0; i < npairs; i++) {
    auto tp = detail::collect_tree(s, {-1, pair_ports[i].first}, claimed);
    if (!tp) return fail("pair " + std::to_string(i) + ": no cocontraction tree");
    plus[i] = *tp;
    auto tm = detail::collect_tree(s, {-1, pair_ports[i].second}, claimed);
    if (!tm) return fail("pair " + std::to_string(i) + ": no contraction tree");
    minus[i] = *tm;
    if (!plus[i].cells.empty() && !plus[i].bang) return fail("p+ tree has wrong polarity");
    if (!minus[i].cells.empty() && minus[i].bang) return fail("p- tree has wrong polarity");
  }
  if (claimed.size() != s.cells.size()) return fail("unclaimed cells remain");
  // every tree has arity npairs-1
  for (size_t i = 0; i < npairs; i++) {
    if (plus[i].leaves.size() != npairs - 1) return fail("p+ tree arity mismatch");
    if (minus[i].leaves.size() != npairs - 1) return fail("p- tree arity mismatch");
  }
  // resolve a port to the tree it belongs to
  auto owner = [&](Port q, bool want_bang) -> int {
    if (q.is_free()) {
      for (size_t j = 0; j < npairs; j++) {
        if (want_bang && q.slot == pair_ports[j].first) return (int)j;
        if (!want_bang && q.slot == pair_ports[j].second) return (int)j;
      }
      return -1;
    }
    for (size_t j = 0; j < npairs; j++) {
      auto& t = want_bang ? plus[j] : minus[j];
      for (int c : t.cells)
        if (c == q.cell) return (int)j;
    }
    return -1;
  };
  for (size_t i = 0; i < npairs; i++) {
    std::set<int> seen;
    for (auto& leaf : plus[i].leaves) {
      int j = owner(leaf, false);
      if (j < 0) return fail("p+ leaf does not land in a contraction tree");
      if (j == (int)i) return fail("p+ leaf lands in its own pair");
      if (!seen.insert(j).second) return fail("p+ leaf lands twice in one pair");
    }
    seen.clear();
    for (auto& leaf : minus[i].leaves) {
      int j = owner(leaf, true);
      if (j < 0) return fail("p- leaf does not land in a cocontraction tree");
      if (j == (int)i) return fail("p- leaf lands in its own pair");
      if (!seen.insert(j).second) return fail("p- leaf lands twice in one pair");
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Toolbox lemma checks
// ---------------------------------------------------------------------------

// Drop two free ports that are wired to each other; the rest reindexes.
inline SimpleNet splice_out_pair(const SimpleNet& s, int f1, int f2) {
  SimpleNet t;
  t.cells = s.cells;
  t.loops = s.loops;
  std::map<int, int> remap;
  for (size_t f = 0; f < s.iface_names.size(); f++) {
    if ((int)f == f1 || (int)f == f2) continue;
    remap[(int)f] = (int)t.iface_names.size();
    t.iface_names.push_back(s.iface_names[f]);
    t.iface_types.push_back(s.iface_types[f]);
  }
  for (auto& [a, b] : s.wires) {
    if ((a == Port{-1, f1} && b == Port{-1, f2}) || (a == Port{-1, f2} && b == Port{-1, f1})) continue;
    auto conv = [&](Port p) { return p.is_free() ? Port{-1, remap.at(p.slot)} : p; };
    t.wires.push_back({conv(a), conv(b)});
  }
  t.sort_wires();
  return t;
}

using CellFactory = std::function<SimpleNet(int, bool)>;

inline CellFactory canonical_cells() {
  return [](int ar, bool co) { return gen_contraction(ar, co); };
}

// Join two areas on their first associated pairs and run the structural
// closure; true iff some reachable net is a communication area of order
// n1+n2 (the canonical-iso fast path is checked first).
inline bool check_aggregation(int n1, int n2, int depth = 32, const CellFactory& cells = canonical_cells()) {
  auto [a, ha] = comm_area_with(n1, cells);
  auto [b, hb] = comm_area_with(n2, cells);
  Builder bl;
  auto [aoff, ap] = bl.merge(a);
  auto [boff, bp] = bl.merge(b);
  (void)aoff;
  (void)boff;
  // pair 1 of each: interface indices 0 (p+) and 1 (p-)
  bl.solder(bl.plugport(ap[0]), bl.plugport(bp[1]));
  bl.solder(bl.plugport(ap[1]), bl.plugport(bp[0]));
  std::vector<std::pair<int, int>> pairs;
  int idx = 0;
  for (int i = 1; i < n1 + 2; i++) {
    bl.expose(ap[2 * i], "a+" + std::to_string(i + 1), LinType::BangO);
    bl.expose(ap[2 * i + 1], "a-" + std::to_string(i + 1), LinType::WhyI);
    pairs.push_back({idx, idx + 1});
    idx += 2;
  }
  for (int i = 1; i < n2 + 2; i++) {
    bl.expose(bp[2 * i], "b+" + std::to_string(i + 1), LinType::BangO);
    bl.expose(bp[2 * i + 1], "b-" + std::to_string(i + 1), LinType::WhyI);
    pairs.push_back({idx, idx + 1});
    idx += 2;
  }
  SimpleNet joined = bl.finalize();
  auto target = comm_area(n1 + n2).first;
  bool exhausted = false;
  auto closure = d_closure(joined, depth, &exhausted);
  for (auto& [key, net] : closure) {
    if (net_iso(net, target)) return true;
    if (recognize_area(net, pairs)) return true;
  }
  return false;
}

struct ForwardingReport {
  bool ok = false;
  int total_summands = 0;
  int communicating = 0;
  std::string detail;
};

// Is the principal port of the labeled cell forwarded (wired to a free port
// directly or through auxiliary slots of a generalized (co)contraction whose
// root principal is free)?
inline bool is_forwarded(const SimpleNet& s, int cell) {
  auto q = s.partner({cell, 0});
  if (!q) return false;
  bool want_bang = s.cells[cell].kind == CellKind::Coder;
  while (true) {
    if (q->is_free()) return true;
    CellKind k = s.cells[q->cell].kind;
    bool fam_ok = want_bang ? (k == CellKind::Cocontr) : (k == CellKind::Contr);
    if (!fam_ok || q->slot == 0) return false;
    q = s.partner({q->cell, 0});
    if (!q) return false;
  }
}

// The Communication-and-forwarding Lemma: codereliction l + weakening on one
// pair of an order-(p+2) area, dereliction m + coweakening on another; the
// {l,m}-closure normalizes to one summand holding the (l,m) redex next to an
// order-p area, with both principal ports forwarded everywhere else.
inline ForwardingReport check_forwarding(int p, const std::string& l, const std::string& m, int depth = 64,
                                         const CellFactory& cells = canonical_cells()) {
  ForwardingReport rep;
  (void)depth;
  auto [area, h] = comm_area_with(p + 2, cells);
  Builder b;
  auto [off, plugs] = b.merge(area);
  (void)off;
  int coder = b.add_cell(CellKind::Coder, l);
  int weak = b.add_cell(CellKind::Weak);
  int der = b.add_cell(CellKind::Der, m);
  int coweak = b.add_cell(CellKind::Coweak);
  b.solder_cp(coder, 0, plugs[1]);   // p-1
  b.solder_cp(weak, 0, plugs[0]);    // p+1
  b.solder_cp(der, 0, plugs[2]);     // p+2
  b.solder_cp(coweak, 0, plugs[3]);  // p-2
  int rl = b.plug(), rm = b.plug();
  b.solder_cp(coder, 1, rl);
  b.solder_cp(der, 1, rm);
  b.expose(rl, "rl");
  b.expose(rm, "rm");
  std::vector<std::pair<int, int>> rest;
  for (int i = 2; i < p + 4; i++) {
    b.expose(plugs[2 * i], "p+" + std::to_string(i + 1), LinType::BangO);
    b.expose(plugs[2 * i + 1], "p-" + std::to_string(i + 1), LinType::WhyI);
    rest.push_back({2 + 2 * (i - 2), 2 + 2 * (i - 2) + 1});
  }
  SimpleNet start = b.finalize();
  auto nf = normal_form(as_net(start), StepPolicy::reduction_over({l, m}), 100000);
  if (!nf) {
    rep.detail = "no normal form within budget";
    return rep;
  }
  rep.total_summands = (int)nf->summands.size();
  bool all_ok = true;
  for (auto& t : nf->summands) {
    int lc = t.cell_by_label(l), mc = t.cell_by_label(m);
    if (lc < 0 || mc < 0) {
      all_ok = false;
      rep.detail += "summand lost a labeled cell; ";
      continue;
    }
    auto q = t.partner({lc, 0});
    bool is_comm = q && !q->is_free() && q->cell == mc && q->slot == 0;
    if (is_comm) {
      rep.communicating++;
      // fire the redex; expect wire rl<->rm plus an area of order p
      Redex r{lc, mc, RuleClass::Communication};
      auto fired = apply_rule(t, r);
      if (fired.summands.size() != 1) {
        all_ok = false;
        rep.detail += "communication did not yield one summand; ";
        continue;
      }
      auto& u = fired.summands[0];
      int frl = -1, frm = -1;
      for (size_t f = 0; f < u.iface_names.size(); f++) {
        if (u.iface_names[f] == "rl") frl = (int)f;
        if (u.iface_names[f] == "rm") frm = (int)f;
      }
      auto pr = u.partner(Port{-1, frl});
      if (!pr || !(*pr == Port{-1, frm})) {
        all_ok = false;
        rep.detail += "redex auxiliaries not joined; ";
        continue;
      }
      auto rest_net = splice_out_pair(u, frl, frm);
      std::string why;
      // pair indices shift down by two after splicing rl/rm out
      std::vector<std::pair<int, int>> shifted;
      for (auto& [x, y] : rest) shifted.push_back({x - 2, y - 2});
      if (!recognize_area(rest_net, shifted, &why)) {
        all_ok = false;
        rep.detail += "residue is not an order-" + std::to_string(p) + " area (" + why + "); ";
      }
    } else {
      if (!is_forwarded(t, lc) || !is_forwarded(t, mc)) {
        all_ok = false;
        rep.detail += "a non-communicating summand is not forwarded; ";
      }
    }
  }
  if (rep.communicating != 1) {
    all_ok = false;
    rep.detail += "expected exactly one communicating summand, got " + std::to_string(rep.communicating);
  }
  rep.ok = all_ok;
  return rep;
}

// The Reduction-of-prefixes Lemma: an n-ary output prefix labeled m against a
// p-ary input prefix labeled l reduces (communication step, then tau-closure)
// to 2*min(n,p) crosswise wires when n == p and to the 0 net otherwise.
inline bool check_prefix_reduction(int n, int p, const std::string& l, const std::string& m,
                                   int max_steps = 100000) {
  Builder b;
  auto [ooff, oports] = b.merge(prefix_cell(false, n, m));
  auto [ioff, iports] = b.merge(prefix_cell(true, p, l));
  (void)ooff;
  (void)ioff;
  b.solder(b.plugport(oports[0]), b.plugport(iports[0]));
  for (int i = 0; i < n; i++) {
    b.expose(oports[1 + 2 * i], "o+" + std::to_string(i + 1), LinType::WhyI);
    b.expose(oports[2 + 2 * i], "o-" + std::to_string(i + 1), LinType::BangO);
  }
  for (int i = 0; i < p; i++) {
    b.expose(iports[1 + 2 * i], "i+" + std::to_string(i + 1), LinType::WhyI);
    b.expose(iports[2 + 2 * i], "i-" + std::to_string(i + 1), LinType::BangO);
  }
  SimpleNet start = b.finalize();
  // first the (l,m) communication step
  int lc = start.cell_by_label(l), mc = start.cell_by_label(m);
  if (lc < 0 || mc < 0) return false;
  auto q = start.partner({mc, 0});
  if (!q || q->is_free() || q->cell != lc || q->slot != 0) return false;
  auto after = apply_rule(start, Redex{mc, lc, RuleClass::Communication});
  // then tau-closure to the normal form
  auto nf = normal_form(after, StepPolicy::tau_full(), max_steps);
  if (!nf) return false;
  if (n != p) return nf->summands.empty();
  if (nf->summands.size() != 1) return false;
  auto& u = nf->summands[0];
  if (!u.cells.empty() || u.loops != 0) return false;
  // expect o+i <-> i-i and o-i <-> i+i
  for (int i = 0; i < n; i++) {
    int oplus = 2 * i, ominus = 2 * i + 1, iplus = 2 * n + 2 * i, iminus = 2 * n + 2 * i + 1;
    auto w1 = u.partner(Port{-1, oplus});
    auto w2 = u.partner(Port{-1, ominus});
    if (!w1 || !(*w1 == Port{-1, iminus})) return false;
    if (!w2 || !(*w2 == Port{-1, iplus})) return false;
  }
  return true;
}

}  // namespace solace::toolbox
