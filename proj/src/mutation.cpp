#include "specgen/mutation.hpp"

#include "specgen/errors.hpp"
#include "specgen/syntax.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>

namespace specgen {

std::string_view to_string(MutationKind kind) {
  switch (kind) {
    case MutationKind::Predicative: return "predicative";
    case MutationKind::Logical: return "logical";
    case MutationKind::Comparative: return "comparative";
    case MutationKind::Arithmetic: return "arithmetic";
  }
  return "?";
}

std::optional<MutationKind> mutation_kind_from_string(std::string_view s) {
  for (auto k : kAllMutationKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

MutationKindSet all_mutation_kinds() { return {kAllMutationKinds.begin(), kAllMutationKinds.end()}; }

std::string operator_token(const Operator &op) {
  if (const auto *b = std::get_if<BinaryOp>(&op)) return std::string(to_string(*b));
  return std::string(to_string(std::get<QuantKind>(op)));
}

std::string replacement_token(const Replacement &r) {
  switch (r.shift) {
    case LeftShift::MinusOne: return "- 1 " + operator_token(r.op);
    case LeftShift::PlusOne: return "+ 1 " + operator_token(r.op);
    case LeftShift::None: break;
  }
  return operator_token(r.op);
}

std::optional<MutationKind> mutation_kind_of(const Operator &op) {
  if (std::holds_alternative<QuantKind>(op)) return MutationKind::Predicative;
  switch (std::get<BinaryOp>(op)) {
    case BinaryOp::And:
    case BinaryOp::Or:
    case BinaryOp::Equiv:
    case BinaryOp::Implies:
    case BinaryOp::RevImplies: return MutationKind::Logical;
    case BinaryOp::Le:
    case BinaryOp::Ge:
    case BinaryOp::Lt:
    case BinaryOp::Gt:
    case BinaryOp::Eq:
    case BinaryOp::Ne: return MutationKind::Comparative;
    case BinaryOp::Add:
    case BinaryOp::Sub: return MutationKind::Arithmetic;
    default: return std::nullopt;
  }
}

std::vector<Replacement> replacements_for(const Operator &op) {
  if (const auto *q = std::get_if<QuantKind>(&op)) {
    return {{*q == QuantKind::Forall ? QuantKind::Exists : QuantKind::Forall}};
  }
  switch (std::get<BinaryOp>(op)) {
    case BinaryOp::And: return {{BinaryOp::Or}};
    case BinaryOp::Or: return {{BinaryOp::And}};
    case BinaryOp::Equiv: return {{BinaryOp::RevImplies}, {BinaryOp::Implies}};
    case BinaryOp::Implies: return {{BinaryOp::RevImplies}};
    case BinaryOp::RevImplies: return {{BinaryOp::Implies}};
    case BinaryOp::Le: return {{BinaryOp::Lt}, {BinaryOp::Le, LeftShift::MinusOne}};
    case BinaryOp::Ge: return {{BinaryOp::Gt}, {BinaryOp::Ge, LeftShift::PlusOne}};
    case BinaryOp::Lt: return {{BinaryOp::Le}};
    case BinaryOp::Gt: return {{BinaryOp::Ge}};
    case BinaryOp::Eq: return {{BinaryOp::Ne}};
    case BinaryOp::Ne: return {{BinaryOp::Eq}};
    case BinaryOp::Add: return {{BinaryOp::Sub}};
    case BinaryOp::Sub: return {{BinaryOp::Add}};
    default: return {};
  }
}

namespace {

void collect_sites(const Expr &e, TreePath &path, std::vector<MutationSite> &out) {
  auto child = [&](const ExprPtr &c, std::uint8_t i) {
    path.push_back(i);
    collect_sites(*c, path, out);
    path.pop_back();
  };
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Quantifier>) {
          out.push_back({path, MutationKind::Predicative, n.kind});
          child(n.range, 0);
          child(n.body, 1);
        } else if constexpr (std::is_same_v<T, Binary>) {
          if (auto kind = mutation_kind_of(n.op)) out.push_back({path, *kind, n.op});
          child(n.lhs, 0);
          child(n.rhs, 1);
        } else if constexpr (std::is_same_v<T, Unary>) {
          child(n.operand, 0);
        } else if constexpr (std::is_same_v<T, ArrayIndex>) {
          child(n.base, 0);
          child(n.index, 1);
        } else if constexpr (std::is_same_v<T, FieldAccess>) {
          child(n.base, 0);
        } else if constexpr (std::is_same_v<T, OldRef>) {
          child(n.inner, 0);
        }
      },
      e.node);
}

std::string path_string(const TreePath &p) {
  std::string s = "[";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + std::to_string(p[i]);
  return s + "]";
}

class Rewriter {
 public:
  explicit Rewriter(const std::vector<MutationChoice> &choices) {
    for (const auto &c : choices) {
      if (!by_path_.emplace(c.site.path, &c).second) {
        throw SitePathInvalid("two choices for site " + path_string(c.site.path));
      }
      for (std::size_t n = 0; n <= c.site.path.size(); ++n) {
        prefixes_.emplace(c.site.path.begin(), c.site.path.begin() + static_cast<long>(n));
      }
    }
  }

  ExprPtr rewrite(const ExprPtr &e) {
    TreePath path;
    auto out = visit(e, path);
    if (applied_ != by_path_.size()) {
      for (const auto &[p, c] : by_path_) {
        if (!seen_.contains(p)) throw SitePathInvalid("site path " + path_string(p) + " does not resolve");
      }
    }
    return out;
  }

 private:
  ExprPtr visit(const ExprPtr &e, TreePath &path) {
    if (!prefixes_.contains(path)) return e;
    auto child = [&](const ExprPtr &c, std::uint8_t i) {
      path.push_back(i);
      auto r = visit(c, path);
      path.pop_back();
      return r;
    };
    auto it = by_path_.find(path);
    const MutationChoice *choice = it == by_path_.end() ? nullptr : it->second;
    if (choice) seen_.insert(path);

    return std::visit(
        [&](const auto &n) -> ExprPtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Quantifier>) {
            auto range = child(n.range, 0);
            auto body = child(n.body, 1);
            QuantKind kind = n.kind;
            if (choice) {
              check(choice->site.original == Operator{n.kind});
              kind = std::get<QuantKind>(choice->replacement.op);
              ++applied_;
            }
            return build::quant(kind, n.var, range, body);
          } else if constexpr (std::is_same_v<T, Binary>) {
            auto lhs = child(n.lhs, 0);
            auto rhs = child(n.rhs, 1);
            BinaryOp op = n.op;
            if (choice) {
              check(choice->site.original == Operator{n.op});
              op = std::get<BinaryOp>(choice->replacement.op);
              if (choice->replacement.shift == LeftShift::MinusOne) {
                lhs = build::bin(BinaryOp::Sub, lhs, build::lit(1));
              } else if (choice->replacement.shift == LeftShift::PlusOne) {
                lhs = build::bin(BinaryOp::Add, lhs, build::lit(1));
              }
              ++applied_;
            }
            return build::bin(op, lhs, rhs);
          } else {
            check(!choice);
            if constexpr (std::is_same_v<T, Unary>) {
              return build::un(n.op, child(n.operand, 0));
            } else if constexpr (std::is_same_v<T, ArrayIndex>) {
              auto base = child(n.base, 0);
              return build::index(base, child(n.index, 1));
            } else if constexpr (std::is_same_v<T, FieldAccess>) {
              return build::field(child(n.base, 0), n.field);
            } else if constexpr (std::is_same_v<T, OldRef>) {
              return build::old(child(n.inner, 0));
            } else {
              // Leaves cannot hold a site or lie on the way to one.
              throw SitePathInvalid("site path runs past a leaf");
            }
          }
        },
        e->node);
  }

  static void check(bool ok) {
    if (!ok) throw SitePathInvalid("operator at site path does not match the recorded original");
  }

  std::map<TreePath, const MutationChoice *> by_path_;
  std::set<TreePath> prefixes_;
  std::set<TreePath> seen_;
  std::size_t applied_ = 0;
};

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

struct SiteOptions {
  MutationSite site;
  std::vector<Replacement> replacements;
};

// Option 0 is "leave the site alone"; option i > 0 is replacement i - 1.
Variant make_variant(const SpecClause &templ, const std::vector<SiteOptions> &sites,
                     const std::vector<std::size_t> &option, const WeightTable &weights) {
  Variant v;
  v.template_id = templ.id;
  for (std::size_t s = 0; s < sites.size(); ++s) {
    if (option[s] == 0) continue;
    v.choices.push_back({sites[s].site, sites[s].replacements[option[s] - 1]});
    ++v.counts[static_cast<int>(sites[s].site.kind)];
  }
  v.clause = templ;
  v.clause.expr = v.choices.empty() ? templ.expr : apply_choices(templ.expr, v.choices);
  v.text = render_clause(v.clause);
  v.score = score_variant(v, weights);
  return v;
}

bool canonical_less(const Variant &a, const Variant &b) {
  if (a.score != b.score) return a.score > b.score;
  return a.text < b.text;
}

}  // namespace

std::vector<MutationSite> enumerate_sites(const Expr &expr) {
  std::vector<MutationSite> out;
  TreePath path;
  collect_sites(expr, path, out);
  return out;
}

ExprPtr apply_choices(const ExprPtr &expr, const std::vector<MutationChoice> &choices) {
  for (const auto &c : choices) {
    auto allowed = replacements_for(c.site.original);
    if (std::find(allowed.begin(), allowed.end(), c.replacement) == allowed.end()) {
      throw SitePathInvalid("replacement '" + replacement_token(c.replacement) +
                            "' is not a mutation of '" + operator_token(c.site.original) + "'");
    }
  }
  return Rewriter(choices).rewrite(expr);
}

ExprPtr apply_choice(const ExprPtr &expr, const MutationChoice &choice) {
  return apply_choices(expr, {choice});
}

int Variant::total_mutations() const { return counts[0] + counts[1] + counts[2] + counts[3]; }

const Variant *Family::find(std::string_view text) const {
  for (const auto &m : members) {
    if (m.text == text) return &m;
  }
  return nullptr;
}

bool Family::remove(std::string_view text) {
  auto it = std::find_if(members.begin(), members.end(), [&](const Variant &v) { return v.text == text; });
  if (it == members.end()) return false;
  members.erase(it);
  return true;
}

std::int64_t score_variant(const Variant &variant, const WeightTable &weights) {
  std::int64_t total = 0;
  for (auto k : kAllMutationKinds) total += static_cast<std::int64_t>(variant.count(k)) * weights[k];
  return total;
}

Family enumerate_variants(const SpecClause &templ, const MutationKindSet &kinds, std::size_t cap,
                          const WeightTable &weights) {
  if (cap == 0) cap = 1;
  std::vector<SiteOptions> sites;
  std::uint64_t raw = 1;
  for (auto &site : enumerate_sites(*templ.expr)) {
    if (!kinds.contains(site.kind)) continue;
    auto reps = replacements_for(site.original);
    raw = saturating_mul(raw, reps.size() + 1);
    sites.push_back({std::move(site), std::move(reps)});
  }

  Family family;
  family.template_id = templ.id;
  family.template_clause = templ;
  family.raw_combinations = raw;

  std::unordered_map<std::string, std::size_t> by_text;
  std::vector<Variant> variants;
  auto add = [&](Variant v) {
    auto [it, inserted] = by_text.emplace(v.text, variants.size());
    if (inserted) {
      variants.push_back(std::move(v));
      return;
    }
    ++family.merged_duplicates;
    if (v.score > variants[it->second].score) variants[it->second] = std::move(v);
  };

  if (raw <= cap) {
    std::vector<std::size_t> option(sites.size(), 0);
    for (;;) {
      add(make_variant(templ, sites, option, weights));
      std::size_t s = 0;
      while (s < sites.size() && ++option[s] > sites[s].replacements.size()) option[s++] = 0;
      if (s == sites.size()) break;
    }
  } else {
    // Best-first over option vectors. Each site's options are ordered by value
    // so that every successor scores no higher than its parent; a state only
    // advances positions at or after the last one it advanced, so each vector
    // is generated exactly once.
    family.truncated = true;
    std::vector<std::vector<std::size_t>> order(sites.size());
    std::vector<std::vector<std::int64_t>> value(sites.size());
    for (std::size_t s = 0; s < sites.size(); ++s) {
      std::int64_t w = weights[sites[s].site.kind];
      for (std::size_t o = 0; o <= sites[s].replacements.size(); ++o) order[s].push_back(o);
      if (w > 0) std::rotate(order[s].begin(), order[s].begin() + 1, order[s].end());
      for (auto o : order[s]) value[s].push_back(o == 0 ? 0 : w);
    }
    struct State {
      std::int64_t score;
      std::vector<std::size_t> rank;  // index into order[s]
      std::size_t last;
    };
    auto worse = [](const State &a, const State &b) {
      if (a.score != b.score) return a.score < b.score;
      return a.rank > b.rank;
    };
    std::priority_queue<State, std::vector<State>, decltype(worse)> heap(worse);
    State root{0, std::vector<std::size_t>(sites.size(), 0), 0};
    for (std::size_t s = 0; s < sites.size(); ++s) root.score += value[s][0];
    heap.push(root);

    std::optional<std::int64_t> boundary;
    while (!heap.empty()) {
      State st = heap.top();
      if (boundary && st.score < *boundary) break;
      heap.pop();
      std::vector<std::size_t> option(sites.size());
      for (std::size_t s = 0; s < sites.size(); ++s) option[s] = order[s][st.rank[s]];
      add(make_variant(templ, sites, option, weights));
      if (!boundary && variants.size() >= cap) boundary = st.score;
      for (std::size_t s = st.last; s < sites.size(); ++s) {
        if (st.rank[s] + 1 >= order[s].size()) continue;
        State nx = st;
        nx.score += value[s][st.rank[s] + 1] - value[s][st.rank[s]];
        ++nx.rank[s];
        nx.last = s;
        heap.push(std::move(nx));
      }
    }
  }

  std::sort(variants.begin(), variants.end(), canonical_less);
  if (variants.size() > cap) variants.resize(cap);
  family.members = std::move(variants);
  family.initial_size = family.members.size();
  return family;
}

const Variant *select_by_heuristic(const Family &family, const WeightTable &weights) {
  const Variant *best = nullptr;
  std::int64_t best_score = 0;
  for (const auto &v : family.members) {
    auto s = score_variant(v, weights);
    if (!best || s > best_score || (s == best_score && v.text < best->text)) {
      best = &v;
      best_score = s;
    }
  }
  return best;
}

std::uint64_t uniform_index(std::mt19937_64 &rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

const Variant *select_random(const Family &family, std::mt19937_64 &rng) {
  if (family.members.empty()) return nullptr;
  return &family.members[uniform_index(rng, family.members.size())];
}

const Variant *select_random(const Family &family, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return select_random(family, rng);
}

}  // namespace specgen
