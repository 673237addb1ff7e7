#include "fixedprice/rational_lp.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "fixedprice/errors.hpp"

namespace fixedprice {

int RationalLP::add_variable(std::string name, std::optional<Rational> lower, std::optional<Rational> upper) {
  if (lower) lower->canonicalize();
  if (upper) upper->canonicalize();
  variables_.push_back({std::move(name), std::move(lower), std::move(upper)});
  objective_.emplace_back(0);
  return static_cast<int>(variables_.size()) - 1;
}

bool RationalLP::add_row(LpRow row) {
  std::map<int, Rational> merged;
  for (auto& t : row.terms) {
    if (t.var < 0 || t.var >= variable_count()) {
      throw InvalidInput("LP row \"" + row.name + "\" refers to variable " + std::to_string(t.var) +
                         " outside 0.." + std::to_string(variable_count() - 1));
    }
    t.coef.canonicalize();
    merged[t.var] += t.coef;
  }
  row.rhs.canonicalize();
  row.terms.clear();
  std::string key = std::to_string(static_cast<int>(row.relation)) + "|" + to_string(row.rhs);
  for (auto& [var, coef] : merged) {
    if (coef == 0) continue;
    key += "|" + std::to_string(var) + ":" + to_string(coef);
    row.terms.push_back({var, coef});
  }
  if (!row_keys_.insert(key).second) return false;
  rows_.push_back(std::move(row));
  return true;
}

void RationalLP::set_objective(int var, Rational coef) {
  coef.canonicalize();
  objective_.at(static_cast<std::size_t>(var)) = std::move(coef);
}

void RationalLP::add_objective(int var, const Rational& coef) {
  Rational c = coef;
  c.canonicalize();
  objective_.at(static_cast<std::size_t>(var)) += c;
}

std::optional<int> RationalLP::find_variable(const std::string& name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

Rational RationalLP::evaluate_objective(const std::vector<Rational>& values) const {
  Rational z = 0;
  for (std::size_t j = 0; j < objective_.size(); ++j) z += objective_[j] * values.at(j);
  return z;
}

std::vector<std::string> RationalLP::violations(const std::vector<Rational>& values) const {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    const auto& v = variables_[j];
    if (v.lower && values.at(j) < *v.lower) out.push_back(v.name + " below its lower bound");
    if (v.upper && values.at(j) > *v.upper) out.push_back(v.name + " above its upper bound");
  }
  for (const auto& row : rows_) {
    Rational lhs = 0;
    for (const auto& t : row.terms) lhs += t.coef * values.at(static_cast<std::size_t>(t.var));
    bool ok = row.relation == Relation::LessEqual ? lhs <= row.rhs
              : row.relation == Relation::GreaterEqual ? lhs >= row.rhs
                                                       : lhs == row.rhs;
    if (!ok) out.push_back(row.name);
  }
  return out;
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

// x_var = base[var] + sign * column value, all columns nonnegative.
struct Column {
  int var;
  int sign;
};

// Row in the form sum(coef * column) <= rhs.
struct StandardRow {
  std::vector<std::pair<int, Rational>> terms;
  Rational rhs;
  int source = -1;  // original row, or -1 for an upper-bound row
  int sign = 1;     // +1 if copied, -1 if negated from the original
  int bound_var = -1;
  bool lazy = false;
};

struct StandardForm {
  std::vector<Column> columns;
  std::vector<Rational> base;
  std::vector<Rational> cost;
  Rational cost_offset;
  std::vector<StandardRow> rows;
  bool trivially_infeasible = false;
};

StandardForm standardize(const RationalLP& lp) {
  StandardForm sf;
  const auto& vars = lp.variables();
  std::vector<std::vector<int>> columns_of(vars.size());
  sf.base.resize(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const auto& v = vars[j];
    auto add_col = [&](int sign) {
      columns_of[j].push_back(static_cast<int>(sf.columns.size()));
      sf.columns.push_back({static_cast<int>(j), sign});
    };
    if (v.lower) {
      sf.base[j] = *v.lower;
      add_col(1);
      if (v.upper) {
        if (*v.upper < *v.lower) sf.trivially_infeasible = true;
        StandardRow r;
        r.terms.push_back({columns_of[j][0], Rational(1)});
        r.rhs = *v.upper - *v.lower;
        r.bound_var = static_cast<int>(j);
        sf.rows.push_back(std::move(r));
      }
    } else if (v.upper) {
      sf.base[j] = *v.upper;
      add_col(-1);
    } else {
      sf.base[j] = 0;
      add_col(1);
      add_col(-1);
    }
  }
  sf.cost.assign(sf.columns.size(), Rational(0));
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const Rational& c = lp.objective()[j];
    sf.cost_offset += c * sf.base[j];
    for (int col : columns_of[j]) sf.cost[static_cast<std::size_t>(col)] = c * sf.columns[static_cast<std::size_t>(col)].sign;
  }
  const auto& rows = lp.rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    StandardRow r;
    r.source = static_cast<int>(i);
    r.lazy = row.lazy;
    r.rhs = row.rhs;
    for (const auto& t : row.terms) {
      r.rhs -= t.coef * sf.base[static_cast<std::size_t>(t.var)];
      for (int col : columns_of[static_cast<std::size_t>(t.var)]) {
        r.terms.push_back({col, t.coef * sf.columns[static_cast<std::size_t>(col)].sign});
      }
    }
    auto negated = [](StandardRow x) {
      for (auto& t : x.terms) t.second = -t.second;
      x.rhs = -x.rhs;
      x.sign = -1;
      return x;
    };
    if (row.relation == Relation::LessEqual) {
      sf.rows.push_back(std::move(r));
    } else if (row.relation == Relation::GreaterEqual) {
      sf.rows.push_back(negated(std::move(r)));
    } else {
      sf.rows.push_back(negated(r));
      sf.rows.push_back(std::move(r));
    }
  }
  return sf;
}

// A row whose coefficients are all nonpositive holds for every nonnegative
// point when its right-hand side is nonnegative.
bool implied_by_bounds(const StandardRow& row) {
  if (row.rhs < 0) return false;
  for (const auto& t : row.terms) {
    if (t.second > 0) return false;
  }
  return true;
}

bool empty_and_violated(const StandardRow& row) {
  if (row.rhs >= 0) return false;
  for (const auto& t : row.terms) {
    if (t.second != 0) return false;
  }
  return true;
}

class Dictionary {
 public:
  Dictionary(int ncols, const std::vector<const StandardRow*>& rows) : m_(static_cast<int>(rows.size())), n_(ncols) {
    a_.assign(static_cast<std::size_t>(m_) * static_cast<std::size_t>(n_), Rational(0));
    b_.resize(static_cast<std::size_t>(m_));
    c_.assign(static_cast<std::size_t>(n_), Rational(0));
    for (int i = 0; i < m_; ++i) {
      for (const auto& [col, coef] : rows[static_cast<std::size_t>(i)]->terms) at(i, col) += coef;
      b_[static_cast<std::size_t>(i)] = rows[static_cast<std::size_t>(i)]->rhs;
      basic_.push_back(n_ + i);
    }
    for (int j = 0; j < n_; ++j) nonbasic_.push_back(j);
  }

  // Returns Optimal, Infeasible or Unbounded for max cost.x over the rows.
  LpStatus solve(const std::vector<Rational>& cost) {
    const int structural = n_;
    bool needs_phase_one = false;
    for (const auto& v : b_) needs_phase_one = needs_phase_one || v < 0;
    if (needs_phase_one) {
      const int aux_id = structural + m_;
      add_column(aux_id, Rational(-1));
      c_.assign(static_cast<std::size_t>(n_), Rational(0));
      c_.back() = -1;
      z_ = 0;
      int r = 0;
      for (int i = 1; i < m_; ++i) {
        if (b_[static_cast<std::size_t>(i)] < b_[static_cast<std::size_t>(r)]) r = i;
      }
      pivot(r, n_ - 1);
      if (run() != LpStatus::Optimal) throw InternalInconsistency("phase one of the simplex is unbounded");
      if (z_ < 0) return LpStatus::Infeasible;
      int aux_col = column_of(aux_id);
      if (aux_col < 0) {
        int r_aux = row_of(aux_id);
        int s = -1;
        for (int j = 0; j < n_; ++j) {
          if (at(r_aux, j) != 0 && (s < 0 || nonbasic_[static_cast<std::size_t>(j)] < nonbasic_[static_cast<std::size_t>(s)])) s = j;
        }
        if (s < 0) throw InternalInconsistency("auxiliary variable cannot leave the basis");
        pivot(r_aux, s);
        aux_col = column_of(aux_id);
      }
      drop_column(aux_col);
    }
    // Express the real objective in terms of the current nonbasic variables.
    c_.assign(static_cast<std::size_t>(n_), Rational(0));
    z_ = 0;
    for (int j = 0; j < n_; ++j) {
      int id = nonbasic_[static_cast<std::size_t>(j)];
      if (id < structural) c_[static_cast<std::size_t>(j)] += cost[static_cast<std::size_t>(id)];
    }
    for (int i = 0; i < m_; ++i) {
      int id = basic_[static_cast<std::size_t>(i)];
      if (id >= structural) continue;
      const Rational& w = cost[static_cast<std::size_t>(id)];
      if (w == 0) continue;
      z_ += w * b_[static_cast<std::size_t>(i)];
      for (int j = 0; j < n_; ++j) {
        if (at(i, j) != 0) c_[static_cast<std::size_t>(j)] -= w * at(i, j);
      }
    }
    bland_ = false;
    degenerate_run_ = 0;
    return run();
  }

  std::vector<Rational> column_values(int ncols) const {
    std::vector<Rational> x(static_cast<std::size_t>(ncols), Rational(0));
    for (int i = 0; i < m_; ++i) {
      int id = basic_[static_cast<std::size_t>(i)];
      if (id < ncols) x[static_cast<std::size_t>(id)] = b_[static_cast<std::size_t>(i)];
    }
    return x;
  }

  // Dual value of each row: minus the reduced cost of its slack.
  std::vector<Rational> row_duals(int ncols) const {
    std::vector<Rational> y(static_cast<std::size_t>(m_), Rational(0));
    for (int j = 0; j < n_; ++j) {
      int id = nonbasic_[static_cast<std::size_t>(j)];
      if (id >= ncols && id < ncols + m_) y[static_cast<std::size_t>(id - ncols)] = -c_[static_cast<std::size_t>(j)];
    }
    return y;
  }

  const Rational& objective() const { return z_; }
  int pivots() const { return pivots_; }

 private:
  Rational& at(int i, int j) { return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)]; }
  const Rational& at(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)];
  }

  int column_of(int id) const {
    for (int j = 0; j < n_; ++j) {
      if (nonbasic_[static_cast<std::size_t>(j)] == id) return j;
    }
    return -1;
  }
  int row_of(int id) const {
    for (int i = 0; i < m_; ++i) {
      if (basic_[static_cast<std::size_t>(i)] == id) return i;
    }
    return -1;
  }

  void add_column(int id, const Rational& value) {
    std::vector<Rational> grown(static_cast<std::size_t>(m_) * static_cast<std::size_t>(n_ + 1));
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) grown[static_cast<std::size_t>(i * (n_ + 1) + j)] = std::move(at(i, j));
      grown[static_cast<std::size_t>(i * (n_ + 1) + n_)] = value;
    }
    a_ = std::move(grown);
    ++n_;
    nonbasic_.push_back(id);
    c_.resize(static_cast<std::size_t>(n_));
  }

  void drop_column(int s) {
    std::vector<Rational> shrunk(static_cast<std::size_t>(m_) * static_cast<std::size_t>(n_ - 1));
    for (int i = 0; i < m_; ++i) {
      int k = 0;
      for (int j = 0; j < n_; ++j) {
        if (j == s) continue;
        shrunk[static_cast<std::size_t>(i * (n_ - 1) + k++)] = std::move(at(i, j));
      }
    }
    a_ = std::move(shrunk);
    --n_;
    nonbasic_.erase(nonbasic_.begin() + s);
    c_.erase(c_.begin() + s);
  }

  int entering() const {
    int best = -1;
    for (int j = 0; j < n_; ++j) {
      const Rational& cj = c_[static_cast<std::size_t>(j)];
      if (cj <= 0) continue;
      if (best < 0) {
        best = j;
        continue;
      }
      const int id = nonbasic_[static_cast<std::size_t>(j)];
      const int best_id = nonbasic_[static_cast<std::size_t>(best)];
      if (bland_) {
        if (id < best_id) best = j;
      } else {
        const Rational& cb = c_[static_cast<std::size_t>(best)];
        if (cj > cb || (cj == cb && id < best_id)) best = j;
      }
    }
    return best;
  }

  int leaving(int s) const {
    int best = -1;
    for (int i = 0; i < m_; ++i) {
      const Rational& ais = at(i, s);
      if (ais <= 0) continue;
      if (best < 0) {
        best = i;
        continue;
      }
      // Compare b_i / a_is with b_best / a_best,s without dividing.
      Rational lhs = b_[static_cast<std::size_t>(i)] * at(best, s);
      Rational rhs = b_[static_cast<std::size_t>(best)] * ais;
      if (lhs < rhs || (lhs == rhs && basic_[static_cast<std::size_t>(i)] < basic_[static_cast<std::size_t>(best)])) best = i;
    }
    return best;
  }

  LpStatus run() {
    for (;;) {
      int s = entering();
      if (s < 0) return LpStatus::Optimal;
      int r = leaving(s);
      if (r < 0) return LpStatus::Unbounded;
      bool degenerate = b_[static_cast<std::size_t>(r)] == 0;
      pivot(r, s);
      if (degenerate) {
        if (++degenerate_run_ > kDegenerateLimit) bland_ = true;
      } else {
        degenerate_run_ = 0;
      }
    }
  }

  void pivot(int r, int s) {
    ++pivots_;
    Rational inv = 1 / at(r, s);
    std::vector<int> support;
    for (int j = 0; j < n_; ++j) {
      if (j == s) continue;
      Rational& v = at(r, j);
      if (v == 0) continue;
      v *= inv;
      support.push_back(j);
    }
    at(r, s) = inv;
    b_[static_cast<std::size_t>(r)] *= inv;
    const Rational& br = b_[static_cast<std::size_t>(r)];
    Rational f, tmp;
    for (int i = 0; i < m_; ++i) {
      if (i == r || at(i, s) == 0) continue;
      f = at(i, s);
      for (int j : support) {
        mpq_mul(tmp.get_mpq_t(), f.get_mpq_t(), at(r, j).get_mpq_t());
        mpq_sub(at(i, j).get_mpq_t(), at(i, j).get_mpq_t(), tmp.get_mpq_t());
      }
      mpq_mul(tmp.get_mpq_t(), f.get_mpq_t(), br.get_mpq_t());
      mpq_sub(b_[static_cast<std::size_t>(i)].get_mpq_t(), b_[static_cast<std::size_t>(i)].get_mpq_t(), tmp.get_mpq_t());
      at(i, s) = -f * inv;
    }
    if (c_[static_cast<std::size_t>(s)] != 0) {
      f = c_[static_cast<std::size_t>(s)];
      for (int j : support) c_[static_cast<std::size_t>(j)] -= f * at(r, j);
      z_ += f * br;
      c_[static_cast<std::size_t>(s)] = -f * inv;
    }
    std::swap(basic_[static_cast<std::size_t>(r)], nonbasic_[static_cast<std::size_t>(s)]);
  }

  static constexpr int kDegenerateLimit = 50;

  int m_;
  int n_;
  std::vector<Rational> a_;
  std::vector<Rational> b_;
  std::vector<Rational> c_;
  Rational z_;
  std::vector<int> basic_;
  std::vector<int> nonbasic_;
  int pivots_ = 0;
  bool bland_ = false;
  int degenerate_run_ = 0;
};

bool violated(const StandardRow& row, const std::vector<Rational>& x) {
  Rational lhs = 0;
  for (const auto& [col, coef] : row.terms) lhs += coef * x[static_cast<std::size_t>(col)];
  return lhs > row.rhs;
}

}  // namespace

LpSolution solve_lp(const RationalLP& lp) {
  LpSolution sol;
  const auto sf = standardize(lp);
  if (sf.trivially_infeasible) return sol;
  const int ncols = static_cast<int>(sf.columns.size());

  std::vector<int> active;
  std::vector<int> pending;
  for (std::size_t i = 0; i < sf.rows.size(); ++i) {
    const auto& row = sf.rows[i];
    if (empty_and_violated(row)) return sol;
    if (implied_by_bounds(row)) continue;
    (row.lazy ? pending : active).push_back(static_cast<int>(i));
  }

  for (;;) {
    ++sol.rounds;
    std::vector<const StandardRow*> rows;
    for (int i : active) rows.push_back(&sf.rows[static_cast<std::size_t>(i)]);
    Dictionary dict(ncols, rows);
    LpStatus status = dict.solve(sf.cost);
    sol.pivots += dict.pivots();
    if (status == LpStatus::Infeasible) return sol;
    if (status == LpStatus::Unbounded) {
      if (pending.empty()) {
        sol.status = LpStatus::Unbounded;
        return sol;
      }
      active.insert(active.end(), pending.begin(), pending.end());
      pending.clear();
      continue;
    }
    auto x = dict.column_values(ncols);
    std::vector<int> still_pending;
    bool added = false;
    for (int i : pending) {
      if (violated(sf.rows[static_cast<std::size_t>(i)], x)) {
        active.push_back(i);
        added = true;
      } else {
        still_pending.push_back(i);
      }
    }
    pending = std::move(still_pending);
    if (added) continue;

    sol.status = LpStatus::Optimal;
    sol.value = dict.objective() + sf.cost_offset;
    sol.values.assign(lp.variables().size(), Rational(0));
    for (std::size_t j = 0; j < sf.base.size(); ++j) sol.values[j] = sf.base[j];
    for (int col = 0; col < ncols; ++col) {
      const auto& c = sf.columns[static_cast<std::size_t>(col)];
      sol.values[static_cast<std::size_t>(c.var)] += c.sign * x[static_cast<std::size_t>(col)];
    }
    auto y = dict.row_duals(ncols);
    sol.row_duals.assign(lp.rows().size(), Rational(0));
    sol.upper_duals.assign(lp.variables().size(), Rational(0));
    for (std::size_t k = 0; k < active.size(); ++k) {
      const auto& row = sf.rows[static_cast<std::size_t>(active[k])];
      if (row.bound_var >= 0) {
        sol.upper_duals[static_cast<std::size_t>(row.bound_var)] += y[k];
      } else {
        sol.row_duals[static_cast<std::size_t>(row.source)] += row.sign * y[k];
      }
    }
    // Variables bounded only above were substituted as upper - column, so
    // their bound dual is the reduced cost left over by the rows.
    const auto& vars = lp.variables();
    std::vector<Rational> reduced = lp.objective();
    for (std::size_t r = 0; r < lp.rows().size(); ++r) {
      if (sol.row_duals[r] == 0) continue;
      for (const auto& t : lp.rows()[r].terms) reduced[static_cast<std::size_t>(t.var)] -= sol.row_duals[r] * t.coef;
    }
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (!vars[j].lower && vars[j].upper) sol.upper_duals[j] = reduced[j];
    }
    return sol;
  }
}

std::string to_lp_format(const RationalLP& lp) {
  std::ostringstream out;
  auto term = [&](const Rational& coef, int var, bool first) {
    std::string s;
    if (coef < 0) {
      s += first ? "-" : " - ";
    } else if (!first) {
      s += " + ";
    }
    Rational mag = abs(coef);
    if (mag != 1) s += to_string(mag) + " ";
    return s + lp.variables()[static_cast<std::size_t>(var)].name;
  };
  out << "maximize\n  obj:";
  bool first = true;
  for (int j = 0; j < lp.variable_count(); ++j) {
    const auto& c = lp.objective()[static_cast<std::size_t>(j)];
    if (c == 0) continue;
    out << (first ? " " : "") << term(c, j, first);
    first = false;
  }
  if (first) out << " 0";
  out << "\nsubject to\n";
  for (const auto& row : lp.rows()) {
    out << "  " << row.name << ":";
    bool f = true;
    for (const auto& t : row.terms) {
      out << (f ? " " : "") << term(t.coef, t.var, f);
      f = false;
    }
    if (f) out << " 0";
    out << (row.relation == Relation::LessEqual ? " <= " : row.relation == Relation::GreaterEqual ? " >= " : " = ")
        << to_string(row.rhs) << "\n";
  }
  out << "bounds\n";
  for (const auto& v : lp.variables()) {
    out << "  " << (v.lower ? to_string(*v.lower) : std::string("-inf")) << " <= " << v.name << " <= "
        << (v.upper ? to_string(*v.upper) : std::string("+inf")) << "\n";
  }
  out << "end\n";
  return out.str();
}

}  // namespace fixedprice
