#pragma once

// Slot-assignment MIP (objective plus row families c_eq22 .. c_eq30),
// emitted as CPLEX-style LP text. Times are in minutes; depot and site times
// are minutes from midnight. Nothing here solves the model: build, write, read back, and
// replay a given assignment against every row.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "rmcdp/errors.hpp"
#include "rmcdp/feasibility.hpp"
#include "rmcdp/model.hpp"

namespace rmcdp {

enum class VarKind { kContinuous, kBinary };

struct MipVariable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  bool operator==(const MipVariable&) const = default;
};

struct MipTerm {
  double coef = 1.0;
  std::string var;
  bool operator==(const MipTerm&) const = default;
};

enum class Sense { kLe, kGe, kEq };

struct MipRow {
  std::string name;
  int equation = 0;
  std::vector<MipTerm> terms;
  Sense sense = Sense::kEq;
  double rhs = 0.0;
  bool operator==(const MipRow&) const = default;
};

struct MipModel {
  int horizon = 0;
  std::vector<MipVariable> variables;
  std::vector<MipTerm> objective;
  std::vector<MipRow> rows;

  std::size_t binary_count() const {
    return static_cast<std::size_t>(
        std::count_if(variables.begin(), variables.end(), [](const MipVariable& v) { return v.kind == VarKind::kBinary; }));
  }
  std::size_t continuous_count() const { return variables.size() - binary_count(); }
  std::size_t row_count() const { return rows.size(); }
  std::size_t row_count(int equation) const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [&](const MipRow& r) { return r.equation == equation; }));
  }
  const MipRow* row(std::string_view name) const {
    for (const auto& r : rows) {
      if (r.name == name) return &r;
    }
    return nullptr;
  }

  bool operator==(const MipModel&) const = default;
};

namespace mipvar {

inline std::string sj(int i, int j) { return "_s" + std::to_string(i) + "_j" + std::to_string(j); }
inline std::string arrival(int i, int j) { return "ks" + sj(i, j); }
inline std::string depot(int i, int j) { return "kd" + sj(i, j); }
inline std::string gap(int i, int j) { return "T" + sj(i, j); }
inline std::string pair_wait(int i, int j) { return "Wg" + sj(i, j); }
inline std::string first_wait(int i) { return "W_s" + std::to_string(i); }
inline std::string slot(int t, int i, int j) { return "X_t" + std::to_string(t) + sj(i, j); }

}  // namespace mipvar

inline double to_minutes(Seconds s) { return static_cast<double>(s) / 60.0; }

// Default horizon: twice the trip count.
inline int default_horizon(const Instance& instance) { return 2 * instance.total_trips(); }

inline MipModel build_mip(const Instance& instance, int horizon) {
  const int K = instance.total_trips();
  if (horizon < K) {
    throw ValidationError("horizon " + std::to_string(horizon) + " is smaller than the number of trips " +
                          std::to_string(K) + "; every trip needs its own loading slot");
  }
  MipModel m;
  m.horizon = horizon;
  auto cont = [&](std::string name) { m.variables.push_back({std::move(name), VarKind::kContinuous}); };

  for (const auto& s : instance.sites()) {
    const int i = s.id;
    for (int j = 1; j <= instance.trips(i); ++j) {
      cont(mipvar::arrival(i, j));
      cont(mipvar::depot(i, j));
    }
    for (int j = 1; j < instance.trips(i); ++j) {
      cont(mipvar::gap(i, j));
      cont(mipvar::pair_wait(i, j));
    }
    cont(mipvar::first_wait(i));
  }
  for (int t = 1; t <= horizon; ++t) {
    for (const auto& s : instance.sites()) {
      for (int j = 1; j <= instance.trips(s.id); ++j) m.variables.push_back({mipvar::slot(t, s.id, j), VarKind::kBinary});
    }
  }

  for (const auto& s : instance.sites()) {
    for (int j = 1; j < instance.trips(s.id); ++j) m.objective.push_back({1.0, mipvar::pair_wait(s.id, j)});
  }
  for (const auto& s : instance.sites()) m.objective.push_back({1.0, mipvar::first_wait(s.id)});

  auto add = [&](int eq, std::string suffix, std::vector<MipTerm> terms, Sense sense, double rhs) {
    m.rows.push_back({"c_eq" + std::to_string(eq) + suffix, eq, std::move(terms), sense, rhs});
  };

  for (const auto& s : instance.sites()) {
    const int i = s.id;
    const double U = to_minutes(instance.unload_time(i));
    const double gamma = to_minutes(instance.gamma(i));
    for (int j = 1; j < instance.trips(i); ++j) {
      const std::string tag = mipvar::sj(i, j);
      add(22, tag, {{1, mipvar::arrival(i, j + 1)}, {-1, mipvar::arrival(i, j)}, {-1, mipvar::gap(i, j)}}, Sense::kEq, 0);
      add(23, tag, {{1, mipvar::gap(i, j)}, {-1, mipvar::pair_wait(i, j)}}, Sense::kEq, U);
      add(24, tag, {{1, mipvar::gap(i, j)}}, Sense::kGe, U);
      add(25, tag, {{1, mipvar::gap(i, j)}}, Sense::kLe, gamma);
    }
  }
  for (const auto& s : instance.sites()) {
    // W_i >= k^s_i1 - k^s_i; with W_i >= 0 an early first arrival costs nothing.
    add(26, "_s" + std::to_string(s.id), {{1, mipvar::first_wait(s.id)}, {-1, mipvar::arrival(s.id, 1)}}, Sense::kGe,
        -to_minutes(s.proposed_start));
  }
  for (const auto& s : instance.sites()) {
    const int i = s.id;
    for (int j = 1; j <= instance.trips(i); ++j) {
      add(27, mipvar::sj(i, j), {{1, mipvar::arrival(i, j)}, {-1, mipvar::depot(i, j)}}, Sense::kEq,
          to_minutes(instance.lead_time(i)));
    }
  }
  const Seconds D = instance.depot().start_time;
  const Seconds L = instance.loading_time();
  for (const auto& s : instance.sites()) {
    const int i = s.id;
    for (int j = 1; j <= instance.trips(i); ++j) {
      std::vector<MipTerm> terms;
      for (int t = 1; t <= horizon; ++t) terms.push_back({to_minutes(D + (t - 1) * L), mipvar::slot(t, i, j)});
      terms.push_back({-1, mipvar::depot(i, j)});
      add(28, mipvar::sj(i, j), std::move(terms), Sense::kEq, 0);
    }
  }
  for (int t = 1; t <= horizon; ++t) {
    std::vector<MipTerm> terms;
    for (const auto& s : instance.sites()) {
      for (int j = 1; j <= instance.trips(s.id); ++j) terms.push_back({1, mipvar::slot(t, s.id, j)});
    }
    add(29, "_t" + std::to_string(t), std::move(terms), Sense::kLe, 1);
  }
  for (const auto& s : instance.sites()) {
    const int i = s.id;
    for (int j = 1; j <= instance.trips(i); ++j) {
      std::vector<MipTerm> terms;
      for (int t = 1; t <= horizon; ++t) terms.push_back({1, mipvar::slot(t, i, j)});
      add(30, mipvar::sj(i, j), std::move(terms), Sense::kEq, 1);
    }
  }
  return m;
}

// ---- LP text ---------------------------------------------------------------

namespace detail {

// Shortest text that reads back to the same double.
inline std::string lp_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline constexpr std::size_t kLpLineWidth = 78;

class LineWrapper {
 public:
  explicit LineWrapper(std::ostringstream& out) : out_(out) {}
  void start(const std::string& head) {
    line_ = " " + head;
  }
  void piece(const std::string& p) {
    if (line_.size() + 1 + p.size() > kLpLineWidth && line_.size() > 1) {
      out_ << line_ << '\n';
      line_ = "   " + p;
    } else {
      line_ += (line_.empty() ? "" : " ") + p;
    }
  }
  void finish() {
    out_ << line_ << '\n';
    line_.clear();
  }

 private:
  std::ostringstream& out_;
  std::string line_;
};

inline void emit_terms(LineWrapper& w, const std::vector<MipTerm>& terms) {
  bool first = true;
  for (const auto& term : terms) {
    const double mag = std::abs(term.coef);
    std::string p;
    if (term.coef < 0) {
      p = "- ";
    } else if (!first) {
      p = "+ ";
    }
    if (mag != 1.0) p += lp_number(mag) + " ";
    p += term.var;
    w.piece(p);
    first = false;
  }
  if (terms.empty()) w.piece("0");
}

inline std::string_view sense_text(Sense s) {
  switch (s) {
    case Sense::kLe: return "<=";
    case Sense::kGe: return ">=";
    case Sense::kEq: return "=";
  }
  return "=";
}

}  // namespace detail

inline std::string emit_lp(const MipModel& model) {
  std::ostringstream out;
  out << "\\ ready-mixed concrete slot model, horizon " << model.horizon << ", times in minutes\n";
  out << "Minimize\n";
  detail::LineWrapper w(out);
  w.start("obj:");
  detail::emit_terms(w, model.objective);
  w.finish();
  out << "Subject To\n";
  for (const auto& row : model.rows) {
    w.start(row.name + ":");
    detail::emit_terms(w, row.terms);
    w.piece(std::string(detail::sense_text(row.sense)) + " " + detail::lp_number(row.rhs));
    w.finish();
  }
  out << "Bounds\n";
  for (const auto& v : model.variables) {
    if (v.kind == VarKind::kContinuous) out << ' ' << v.name << " >= 0\n";
  }
  out << "Binaries\n";
  for (const auto& v : model.variables) {
    if (v.kind == VarKind::kBinary) out << ' ' << v.name << '\n';
  }
  out << "End\n";
  return out.str();
}

// Reads the subset of LP format that emit_lp writes. Throws InputError with
// the line number on anything else.
inline MipModel parse_lp(std::string_view text) {
  enum class Section { kNone, kObjective, kConstraints, kBounds, kBinaries, kEnd };
  MipModel m;
  Section section = Section::kNone;

  // Join continuation lines into logical statements first.
  struct Statement {
    std::string text;
    int line;
  };
  std::vector<std::pair<Section, Statement>> statements;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto fail = [](int at, const std::string& why) -> InputError {
    return InputError("LP line " + std::to_string(at) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '\\') continue;
    const bool continuation = line.rfind("   ", 0) == 0;
    std::string body = line;
    body.erase(0, body.find_first_not_of(' '));
    if (line[0] != ' ') {
      if (body == "Minimize") section = Section::kObjective;
      else if (body == "Subject To") section = Section::kConstraints;
      else if (body == "Bounds") section = Section::kBounds;
      else if (body == "Binaries") section = Section::kBinaries;
      else if (body == "End") section = Section::kEnd;
      else throw fail(lineno, "unknown section '" + body + "'");
      continue;
    }
    if (section == Section::kNone || section == Section::kEnd) throw fail(lineno, "content outside a section");
    if (continuation) {
      if (statements.empty() || statements.back().first != section) throw fail(lineno, "dangling continuation");
      statements.back().second.text += " " + body;
    } else {
      statements.push_back({section, {body, lineno}});
    }
  }
  if (section != Section::kEnd) throw InputError("LP text has no End marker");

  auto parse_number = [&](const std::string& tok, int at) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) throw fail(at, "bad number '" + tok + "'");
    return v;
  };
  auto is_number = [](const std::string& tok) {
    return !tok.empty() && (std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '.' ||
                            (tok[0] == '-' && tok.size() > 1));
  };
  // "[-|+] [coef] var ..." up to an optional sense token.
  auto parse_expression = [&](std::istringstream& ts, int at, std::vector<MipTerm>& terms) -> std::optional<Sense> {
    std::string tok;
    double sign = 1.0;
    double coef = 1.0;
    while (ts >> tok) {
      if (tok == "<=" || tok == ">=" || tok == "=") {
        return tok == "<=" ? Sense::kLe : tok == ">=" ? Sense::kGe : Sense::kEq;
      }
      if (tok == "+") {
        sign = 1.0;
      } else if (tok == "-") {
        sign = -1.0;
      } else if (is_number(tok)) {
        coef = parse_number(tok, at);
      } else {
        terms.push_back({sign * coef, tok});
        sign = 1.0;
        coef = 1.0;
      }
    }
    return std::nullopt;
  };
  auto split_name = [&](const std::string& s, int at, std::string& rest) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw fail(at, "missing row name");
    rest = s.substr(colon + 1);
    return s.substr(0, colon);
  };

  std::map<std::string, std::size_t> declared;
  for (auto& [sec, st] : statements) {
    std::string rest;
    switch (sec) {
      case Section::kObjective: {
        split_name(st.text, st.line, rest);
        std::istringstream ts(rest);
        if (parse_expression(ts, st.line, m.objective)) throw fail(st.line, "objective has a sense");
        // "obj: 0" parses as a bare number with no variable.
        break;
      }
      case Section::kConstraints: {
        MipRow row;
        row.name = split_name(st.text, st.line, rest);
        if (row.name.rfind("c_eq", 0) == 0) row.equation = std::atoi(row.name.c_str() + 4);
        std::istringstream ts(rest);
        auto sense = parse_expression(ts, st.line, row.terms);
        if (!sense) throw fail(st.line, "row '" + row.name + "' has no sense");
        row.sense = *sense;
        std::string tok;
        if (!(ts >> tok)) throw fail(st.line, "row '" + row.name + "' has no right-hand side");
        row.rhs = parse_number(tok, st.line);
        if (ts >> tok) throw fail(st.line, "trailing text '" + tok + "'");
        m.rows.push_back(std::move(row));
        break;
      }
      case Section::kBounds: {
        std::istringstream ts(st.text);
        std::string name, op, val;
        if (!(ts >> name >> op >> val) || op != ">=" || parse_number(val, st.line) != 0.0) {
          throw fail(st.line, "only 'x >= 0' bounds are understood");
        }
        declared[name] = m.variables.size();
        m.variables.push_back({name, VarKind::kContinuous});
        break;
      }
      case Section::kBinaries: {
        std::istringstream ts(st.text);
        std::string name;
        while (ts >> name) {
          declared[name] = m.variables.size();
          m.variables.push_back({name, VarKind::kBinary});
          if (name.rfind("X_t", 0) == 0) m.horizon = std::max(m.horizon, std::atoi(name.c_str() + 3));
        }
        break;
      }
      default:
        break;
    }
  }
  auto require_declared = [&](const std::vector<MipTerm>& terms, const std::string& where) {
    for (const auto& t : terms) {
      if (!declared.count(t.var)) throw InputError(where + " references undeclared variable '" + t.var + "'");
    }
  };
  require_declared(m.objective, "objective");
  for (const auto& r : m.rows) require_declared(r.terms, "row " + r.name);
  return m;
}

// ---- assignments -------------------------------------------------------------

// Variable values by name (minutes for times, 0/1 for X).
struct MipAssignment {
  std::map<std::string, double> values;
  double at(const std::string& name) const {
    auto it = values.find(name);
    return it == values.end() ? 0.0 : it->second;
  }
};

// Places a slot-grid schedule into the model's variables. Every depot start
// has to sit on a slot boundary within the horizon.
inline MipAssignment encode_schedule(const Instance& instance, int horizon, const Schedule& schedule) {
  MipAssignment a;
  const MipModel shape = build_mip(instance, horizon);
  for (const auto& v : shape.variables) a.values[v.name] = 0.0;

  const Seconds D = instance.depot().start_time;
  const Seconds L = instance.loading_time();
  const auto by_site = detail::group_by_site(instance, schedule, nullptr);
  for (const auto& e : schedule.entries) {
    const Seconds off = e.depot_start - D;
    if (off < 0 || off % L != 0) {
      throw InputError("trip " + detail::trip_label(e.trip) + " depot start " + format_hmm(e.depot_start) +
                       " is not on the loading-slot grid");
    }
    const int t = static_cast<int>(off / L) + 1;
    if (t > horizon) {
      throw InputError("trip " + detail::trip_label(e.trip) + " needs slot " + std::to_string(t) +
                       " beyond horizon " + std::to_string(horizon));
    }
    if (!instance.has_site(e.trip.site) || e.trip.trip < 1 || e.trip.trip > instance.trips(e.trip.site)) {
      throw InputError("trip " + detail::trip_label(e.trip) + " is not part of the instance");
    }
    a.values[mipvar::slot(t, e.trip.site, e.trip.trip)] = 1.0;
    a.values[mipvar::depot(e.trip.site, e.trip.trip)] = to_minutes(e.depot_start);
    a.values[mipvar::arrival(e.trip.site, e.trip.trip)] = to_minutes(e.site_arrival);
  }
  for (const auto& s : instance.sites()) {
    const int i = s.id;
    const auto& trips = by_site[static_cast<std::size_t>(i - 1)];
    for (std::size_t k = 1; k < trips.size(); ++k) {
      const int j = trips[k - 1]->trip.trip;
      const Seconds gap = trips[k]->site_arrival - trips[k - 1]->site_arrival;
      a.values[mipvar::gap(i, j)] = to_minutes(gap);
      a.values[mipvar::pair_wait(i, j)] = to_minutes(gap - instance.unload_time(i));
    }
    if (!trips.empty()) {
      a.values[mipvar::first_wait(i)] = to_minutes(std::max<Seconds>(0, trips.front()->site_arrival - s.proposed_start));
    }
  }
  return a;
}

struct MipValidation {
  FeasibilityReport report;          // row and bound violations
  double objective = 0.0;            // objective row at the given values, minutes
  std::optional<Schedule> schedule;  // rebuilt from X when every trip has one slot
  std::optional<FeasibilityReport> engine_check;
  std::optional<ObjectiveReport> engine_objective;
  // Objective agrees with the engine's total site wait on the rebuilt schedule.
  bool consistent = false;
};

inline MipValidation validate_solution(const Instance& instance, int horizon, const MipAssignment& assignment) {
  const MipModel model = build_mip(instance, horizon);
  std::map<std::string, VarKind> kinds;
  for (const auto& v : model.variables) kinds[v.name] = v.kind;
  for (const auto& [name, value] : assignment.values) {
    if (!kinds.count(name)) throw InputError("assignment has variable '" + name + "' that the model does not declare");
  }
  for (const auto& v : model.variables) {
    if (v.kind == VarKind::kBinary && !assignment.values.count(v.name)) {
      throw InputError("assignment is missing binary variable '" + v.name + "'");
    }
  }

  constexpr double kTol = 1e-6;
  MipValidation out;
  for (const auto& v : model.variables) {
    const double x = assignment.at(v.name);
    if (v.kind == VarKind::kBinary) {
      if (std::abs(x) > kTol && std::abs(x - 1.0) > kTol) {
        out.report.violations.push_back({ViolationKind::kModelRow, {}, static_cast<Seconds>(std::lround(x * 60)), 60,
                                         v.name + " is not 0 or 1"});
      }
    } else if (x < -kTol) {
      out.report.violations.push_back(
          {ViolationKind::kModelRow, {}, static_cast<Seconds>(std::lround(x * 60)), 0, v.name + " < 0"});
    }
  }

  auto trip_of = [](const std::string& row) {
    // c_eqNN_s<i>_j<j>
    TripId id;
    const auto s = row.find("_s");
    const auto j = row.find("_j");
    if (s != std::string::npos && j != std::string::npos) {
      id.site = std::atoi(row.c_str() + s + 2);
      id.trip = std::atoi(row.c_str() + j + 2);
    }
    return id;
  };

  for (const auto& row : model.rows) {
    double lhs = 0.0;
    for (const auto& t : row.terms) lhs += t.coef * assignment.at(t.var);
    bool ok = true;
    switch (row.sense) {
      case Sense::kLe: ok = lhs <= row.rhs + kTol; break;
      case Sense::kGe: ok = lhs >= row.rhs - kTol; break;
      case Sense::kEq: ok = std::abs(lhs - row.rhs) <= kTol; break;
    }
    if (ok) continue;
    Violation v;
    v.measured = static_cast<Seconds>(std::llround(lhs * 60));
    v.bound = static_cast<Seconds>(std::llround(row.rhs * 60));
    v.detail = row.name + " " + detail::lp_number(lhs) + " " + std::string(detail::sense_text(row.sense)) + " " +
               detail::lp_number(row.rhs);
    const TripId id = trip_of(row.name);
    if (id.site != 0) v.trips.push_back(id);
    switch (row.equation) {
      case 25: v.kind = ViolationKind::kGammaExceeded; break;
      case 29: v.kind = ViolationKind::kSlotConflict; break;
      case 30: v.kind = ViolationKind::kCoverage; break;
      default: v.kind = ViolationKind::kModelRow; break;
    }
    out.report.violations.push_back(std::move(v));
  }

  for (const auto& t : model.objective) out.objective += t.coef * assignment.at(t.var);

  // Rebuild the depot timetable from X alone.
  const Seconds D = instance.depot().start_time;
  const Seconds L = instance.loading_time();
  std::vector<std::vector<Seconds>> starts;
  bool complete = true;
  for (const auto& s : instance.sites()) {
    std::vector<Seconds> site_starts;
    for (int j = 1; j <= instance.trips(s.id); ++j) {
      int hits = 0;
      int slot = 0;
      for (int t = 1; t <= horizon; ++t) {
        if (assignment.at(mipvar::slot(t, s.id, j)) > 0.5) {
          ++hits;
          slot = t;
        }
      }
      if (hits != 1) complete = false;
      site_starts.push_back(D + (slot - 1) * L);
    }
    starts.push_back(std::move(site_starts));
  }
  if (complete) {
    out.schedule = schedule_from_depot_starts(instance, starts, "mip");
    out.engine_check = check(instance, *out.schedule);
    if (out.engine_check->count(ViolationKind::kCoverage) == 0) {
      out.engine_objective = evaluate(instance, *out.schedule);
      out.consistent = std::abs(out.objective - to_minutes(out.engine_objective->total_site_wait)) <= kTol;
    }
  }
  return out;
}

// Relative gap between a lower bound and an incumbent, in percent of the
// incumbent.
inline double optimality_gap_percent(double bound, double incumbent) {
  if (incumbent == 0.0) {
    if (bound == 0.0) return 0.0;
    throw ValidationError("gap is undefined for a zero incumbent with a nonzero bound");
  }
  return (incumbent - bound) / std::abs(incumbent) * 100.0;
}

}  // namespace rmcdp
