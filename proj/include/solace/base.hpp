#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace solace {

using Name = std::string;

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Generated names carry a '%' which the term parsers reject, so they can
// never collide with user names.
class NameGen {
 public:
  Name fresh(const std::string& base) {
    return base + "%" + std::to_string(++counter_);
  }
  bool is_generated(const Name& n) const { return n.find('%') != Name::npos; }

 private:
  uint64_t counter_ = 0;
};

inline bool is_generated_name(const Name& n) { return n.find('%') != Name::npos; }

// Rename generated ('%'-carrying) bound names to parser-safe ones. `taken`
// holds names already visible in the output.
inline Name display_name(const Name& n, std::set<Name>& taken) {
  Name base = n.substr(0, n.find('%'));
  if (base.empty()) base = "g";
  Name cand = base;
  int k = 0;
  while (taken.count(cand)) cand = base + std::to_string(++k);
  taken.insert(cand);
  return cand;
}

// ---------------------------------------------------------------------------
// CanonGraph: canonical forms for small vertex-colored multigraphs with
// per-endpoint edge tags. One engine backs solos congruence, diagram
// isomorphism and net isomorphism: iso(a,b) <=> canonical_string equality.
//
// Individualization-refinement; exhaustive branching on ties, so the result
// is a true canonical form. Desk-scale sizes only (a few hundred vertices).
// ---------------------------------------------------------------------------
class CanonGraph {
 public:
  int add_vertex(const std::string& color) {
    init_.push_back(color);
    adj_.emplace_back();
    return (int)init_.size() - 1;
  }

  void add_edge(int u, int v, int tag_u, int tag_v) {
    int e = (int)edges_.size();
    edges_.push_back({u, v, tag_u, tag_v});
    adj_[u].push_back(e);
    adj_[v].push_back(e);
  }

  // Extra data prepended to the canonical string (loop counts etc).
  void set_preamble(const std::string& s) { preamble_ = s; }

  std::string canonical_string() const {
    ensure();
    return best_str_;
  }

  // rank -> vertex id under the canonical order
  std::vector<int> canonical_order() const {
    ensure();
    return best_order_;
  }

 private:
  struct Edge {
    int u, v, tu, tv;
  };

  std::vector<std::string> init_;
  std::vector<std::vector<int>> adj_;
  std::vector<Edge> edges_;
  std::string preamble_;

  mutable bool done_ = false;
  mutable std::string best_str_;
  mutable std::vector<int> best_order_;
  mutable long leaves_ = 0;

  void ensure() const {
    if (done_) return;
    int n = (int)init_.size();
    // intern initial colors
    std::map<std::string, int> pal;
    for (auto& c : init_) pal.emplace(c, 0);
    int k = 0;
    for (auto& [c, id] : pal) id = k++;
    std::vector<int> col(n);
    for (int i = 0; i < n; i++) col[i] = pal[init_[i]];
    leaves_ = 0;
    best_str_.clear();
    search(col);
    if (best_order_.empty()) {  // n == 0
      best_str_ = preamble_;
    }
    done_ = true;
  }

  // one refinement round; returns number of classes
  int refine(std::vector<int>& col) const {
    int n = (int)init_.size();
    while (true) {
      std::vector<std::pair<std::vector<long>, int>> sig(n);
      for (int v = 0; v < n; v++) {
        std::vector<long> s;
        s.push_back(col[v]);
        std::vector<std::array<long, 3>> nb;
        for (int e : adj_[v]) {
          const Edge& ed = edges_[e];
          if (ed.u == v) nb.push_back({(long)ed.tu, (long)ed.tv, (long)col[ed.v]});
          if (ed.v == v) nb.push_back({(long)ed.tv, (long)ed.tu, (long)col[ed.u]});
        }
        std::sort(nb.begin(), nb.end());
        for (auto& t : nb) {
          s.push_back(t[0]);
          s.push_back(t[1]);
          s.push_back(t[2]);
          s.push_back(-1);
        }
        sig[v] = {std::move(s), v};
      }
      std::vector<int> order(n);
      for (int i = 0; i < n; i++) order[i] = i;
      std::sort(order.begin(), order.end(), [&](int a, int b) { return sig[a].first < sig[b].first; });
      std::vector<int> ncol(n);
      int classes = 0;
      for (int i = 0; i < n; i++) {
        if (i > 0 && sig[order[i]].first != sig[order[i - 1]].first) classes++;
        ncol[order[i]] = classes;
      }
      classes++;
      bool changed = false;
      for (int i = 0; i < n; i++) {
        if (ncol[i] != col[i]) changed = true;
      }
      col = ncol;
      if (!changed) return classes;
    }
  }

  void search(std::vector<int> col) const {
    int n = (int)init_.size();
    if (n == 0) return;
    int classes = refine(col);
    if (classes == n) {
      emit(col);
      return;
    }
    if (++leaves_ > 200000) throw std::runtime_error("canonical labeling: search too large");
    // smallest non-singleton class with the lowest color
    std::vector<int> cnt(classes, 0);
    for (int v = 0; v < n; v++) cnt[col[v]]++;
    int target = -1;
    for (int c = 0; c < classes; c++) {
      if (cnt[c] > 1 && (target < 0 || cnt[c] < cnt[target])) target = c;
    }
    for (int v = 0; v < n; v++) {
      if (col[v] != target) continue;
      std::vector<int> c2(col);
      for (int w = 0; w < n; w++) {
        c2[w] = 2 * c2[w] + (w == v ? 1 : 0);
      }
      search(std::move(c2));
    }
  }

  void emit(const std::vector<int>& col) const {
    int n = (int)init_.size();
    std::vector<int> order(n);  // rank -> vertex
    for (int v = 0; v < n; v++) order[col[v]] = v;
    std::ostringstream os;
    os << preamble_ << '|';
    for (int r = 0; r < n; r++) os << 'v' << r << ':' << init_[order[r]] << ';';
    std::vector<std::array<int, 4>> es;
    for (const Edge& e : edges_) {
      std::array<int, 4> a{col[e.u], e.tu, col[e.v], e.tv};
      std::array<int, 4> b{col[e.v], e.tv, col[e.u], e.tu};
      es.push_back(std::min(a, b));
    }
    std::sort(es.begin(), es.end());
    for (auto& e : es) os << 'e' << e[0] << '.' << e[1] << '-' << e[2] << '.' << e[3] << ';';
    std::string s = os.str();
    if (best_str_.empty() || s < best_str_) {
      best_str_ = std::move(s);
      best_order_ = order;
    }
  }
};

// small helpers -------------------------------------------------------------

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

template <typename T>
inline void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace solace
