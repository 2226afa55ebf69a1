#include "fracopt/io.hpp"

#include <charconv>
#include <sstream>

#include "fracopt/errors.hpp"

namespace fracopt {

namespace {

struct Token {
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(std::istream& in) {
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
      ++line;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
      std::vector<Token> row;
      std::size_t i = 0;
      while (i < raw.size()) {
        while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
        std::size_t j = i;
        while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
        if (j > i) row.push_back({raw.substr(i, j - i), line, i + 1});
        i = j;
      }
      if (!row.empty()) lines_.push_back(std::move(row));
    }
    last_line_ = line;
  }

  bool done() const { return pos_ >= lines_.size(); }

  const std::vector<Token>& next_line(std::size_t expected_tokens, const char* what) {
    if (done()) throw ParseError(std::string("unexpected end of input, expected ") + what, last_line_ + 1, 1);
    const auto& row = lines_[pos_++];
    if (expected_tokens != 0 && row.size() != expected_tokens) {
      std::size_t col = row.size() > expected_tokens ? row[expected_tokens].column : row.back().column;
      throw ParseError(std::string("expected ") + std::to_string(expected_tokens) + " fields for " + what + ", got " +
                           std::to_string(row.size()),
                       row.front().line, col);
    }
    return row;
  }

  void expect_end() const {
    if (!done()) {
      const Token& t = lines_[pos_].front();
      throw ParseError("trailing content", t.line, t.column);
    }
  }

 private:
  std::vector<std::vector<Token>> lines_;
  std::size_t pos_ = 0;
  std::size_t last_line_ = 0;
};

std::size_t to_count(const Token& t) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (ec != std::errc() || p != t.text.data() + t.text.size()) {
    throw ParseError("expected a nonnegative integer, got '" + t.text + "'", t.line, t.column);
  }
  return v;
}

template <Scalar S>
S to_scalar(const Token& t) {
  try {
    return parse_scalar<S>(t.text);
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + t.text + "'", t.line, t.column);
  }
}

void expect_word(const Token& t, const char* word) {
  if (t.text != word) throw ParseError(std::string("expected '") + word + "', got '" + t.text + "'", t.line, t.column);
}

NodeId to_node(const Token& t, std::size_t n) {
  std::size_t v = to_count(t);
  if (v >= n) throw ParseError("node " + t.text + " out of range", t.line, t.column);
  return v;
}

template <Scalar S>
std::vector<S> to_vector(const std::vector<Token>& row, std::size_t from = 0) {
  std::vector<S> out;
  for (std::size_t i = from; i < row.size(); ++i) out.push_back(to_scalar<S>(row[i]));
  return out;
}

template <Scalar S>
GainGraph<S> read_arcs(Lexer& lx, const char* kind, bool discount) {
  const auto& head = lx.next_line(3, "header");
  expect_word(head[0], kind);
  std::size_t n = to_count(head[1]), m = to_count(head[2]);
  GainGraph<S> g(n);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& row = lx.next_line(4, "arc");
    NodeId u = to_node(row[0], n), v = to_node(row[1], n);
    S gamma = to_scalar<S>(row[2]);
    if (!(S(0) < gamma)) throw ParseError("gain factor must be positive", row[2].line, row[2].column);
    if (discount && S(1) < gamma) throw ParseError("discount factor must be at most 1", row[2].line, row[2].column);
    g.add_arc(u, v, gamma, to_scalar<S>(row[3]));
  }
  lx.expect_end();
  return g;
}

template <Scalar S>
void write_arcs(std::ostream& os, const char* kind, const GainGraph<S>& g) {
  os << kind << ' ' << g.node_count() << ' ' << g.arc_count() << '\n';
  for (const auto& a : g.arcs()) {
    os << a.tail << ' ' << a.head << ' ' << format_scalar(a.gamma) << ' ' << format_scalar(a.cost) << '\n';
  }
}

}  // namespace

template <Scalar S>
M2vpiSystem<S> read_m2vpi(std::istream& in) {
  Lexer lx(in);
  return read_arcs<S>(lx, "m2vpi", false);
}

template <Scalar S>
GainGraph<S> read_dmdp(std::istream& in) {
  Lexer lx(in);
  GainGraph<S> g = read_arcs<S>(lx, "dmdp", true);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.out_arcs(v).empty()) throw ParseError("node " + std::to_string(v) + " has no outgoing arc", 1, 1);
  }
  return g;
}

template <Scalar S>
Tvpi2System<S> read_2vpi(std::istream& in) {
  Lexer lx(in);
  const auto& head = lx.next_line(3, "header");
  expect_word(head[0], "2vpi");
  Tvpi2System<S> sys;
  sys.n = to_count(head[1]);
  std::size_t m = to_count(head[2]);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& row = lx.next_line(5, "row");
    sys.rows.push_back({to_scalar<S>(row[0]), to_node(row[1], sys.n), to_scalar<S>(row[2]), to_node(row[3], sys.n),
                        to_scalar<S>(row[4])});
  }
  lx.expect_end();
  return sys;
}

template <Scalar S>
SfmInstance<S> read_sfm(std::istream& in) {
  Lexer lx(in);
  const auto& head = lx.next_line(0, "header");
  if (head.size() < 3) throw ParseError("expected 'sfm table <n>' or 'sfm cut <n> <m>'", head[0].line, head[0].column);
  expect_word(head[0], "sfm");
  SfmInstance<S> inst;
  std::size_t n = to_count(head[2]);
  if (n > kMaxGroundSet) throw ParseError("ground set too large", head[2].line, head[2].column);
  inst.a = to_vector<S>(lx.next_line(n, "weight vector"));
  if (head[1].text == "table") {
    if (head.size() != 3) throw ParseError("unexpected field", head[3].line, head[3].column);
    std::vector<S> values;
    const std::size_t want = std::size_t{1} << n;
    while (values.size() < want) {
      const auto& row = lx.next_line(0, "table values");
      for (const auto& t : row) {
        if (values.size() == want) throw ParseError("too many table values", t.line, t.column);
        values.push_back(to_scalar<S>(t));
      }
    }
    inst.h = std::make_shared<TableFunction<S>>(n, std::move(values));
  } else if (head[1].text == "cut") {
    if (head.size() != 4) throw ParseError("expected 'sfm cut <n> <m>'", head[0].line, head[0].column);
    std::size_t m = to_count(head[3]);
    std::vector<WeightedEdge<S>> edges;
    for (std::size_t k = 0; k < m; ++k) {
      const auto& row = lx.next_line(3, "edge");
      S w = to_scalar<S>(row[2]);
      if (w < S(0)) throw ParseError("edge weight must be nonnegative", row[2].line, row[2].column);
      edges.push_back({to_node(row[0], n), to_node(row[1], n), std::move(w)});
    }
    inst.h = std::make_shared<CutFunction<S>>(n, std::move(edges));
  } else {
    throw ParseError("unknown sfm kind '" + head[1].text + "'", head[1].line, head[1].column);
  }
  lx.expect_end();
  return inst;
}

template <Scalar S>
MinRatioInstance<S> read_min_ratio(std::istream& in) {
  Lexer lx(in);
  MinRatioInstance<S> inst;
  inst.m = to_count(lx.next_line(1, "dimension")[0]);
  inst.c = to_vector<S>(lx.next_line(inst.m, "c"));
  inst.d = to_vector<S>(lx.next_line(inst.m, "d"));
  while (!lx.done()) {
    const Token& t = lx.next_line(1, "domain vector")[0];
    if (t.text.size() != inst.m) throw ParseError("domain vector has the wrong length", t.line, t.column);
    Point x(inst.m);
    for (std::size_t i = 0; i < inst.m; ++i) {
      if (t.text[i] != '0' && t.text[i] != '1') throw ParseError("domain vectors are 0/1 strings", t.line, t.column + i);
      x[i] = t.text[i] == '1';
    }
    inst.domain.push_back(std::move(x));
  }
  if (inst.domain.empty()) throw ParseError("empty domain", 1, 1);
  return inst;
}

template <Scalar S>
void write_m2vpi(std::ostream& os, const M2vpiSystem<S>& sys) {
  write_arcs(os, "m2vpi", sys);
}

template <Scalar S>
void write_dmdp(std::ostream& os, const GainGraph<S>& g) {
  write_arcs(os, "dmdp", g);
}

template <Scalar S>
void write_2vpi(std::ostream& os, const Tvpi2System<S>& sys) {
  os << "2vpi " << sys.n << ' ' << sys.rows.size() << '\n';
  for (const auto& r : sys.rows) {
    os << format_scalar(r.a) << ' ' << r.u << ' ' << format_scalar(r.b) << ' ' << r.v << ' ' << format_scalar(r.c)
       << '\n';
  }
}

template <Scalar S>
void write_sfm(std::ostream& os, const SfmInstance<S>& inst) {
  const std::size_t n = inst.h->ground_size();
  auto write_a = [&] {
    for (std::size_t i = 0; i < n; ++i) os << (i ? " " : "") << format_scalar(inst.a[i]);
    os << '\n';
  };
  if (const auto* cut = dynamic_cast<const CutFunction<S>*>(inst.h.get())) {
    os << "sfm cut " << n << ' ' << cut->edges().size() << '\n';
    write_a();
    for (const auto& e : cut->edges()) os << e.i << ' ' << e.j << ' ' << format_scalar(e.weight) << '\n';
    return;
  }
  os << "sfm table " << n << '\n';
  write_a();
  for (SetMask s = 0; s < (SetMask{1} << n); ++s) {
    os << format_scalar(inst.h->eval(s)) << ((s % 16 == 15 || s + 1 == (SetMask{1} << n)) ? '\n' : ' ');
  }
}

template <Scalar S>
void write_min_ratio(std::ostream& os, const MinRatioInstance<S>& inst) {
  os << inst.m << '\n';
  for (const auto* v : {&inst.c, &inst.d}) {
    for (std::size_t i = 0; i < inst.m; ++i) os << (i ? " " : "") << format_scalar((*v)[i]);
    os << '\n';
  }
  for (const auto& x : inst.domain) os << point_string(x) << '\n';
}

std::string point_string(const Point& x) {
  std::string s;
  for (auto b : x) s += b ? '1' : '0';
  return s;
}

std::string set_string(SetMask set, std::size_t n) {
  std::string s = "{";
  bool first = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!((set >> i) & 1u)) continue;
    if (!first) s += ',';
    s += std::to_string(i);
    first = false;
  }
  return s + "}";
}

std::string walk_string(const Walk& w) {
  std::string s = "start " + std::to_string(w.start) + " arcs";
  for (ArcId e : w.arcs) s += ' ' + std::to_string(e);
  return s;
}

template <Scalar S>
std::string labels_string(const Labels<S>& y) {
  std::string s;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (i) s += ' ';
    s += y[i].str();
  }
  return s;
}

#define FRACOPT_INSTANTIATE(S)                                            \
  template M2vpiSystem<S> read_m2vpi<S>(std::istream&);                   \
  template Tvpi2System<S> read_2vpi<S>(std::istream&);                    \
  template GainGraph<S> read_dmdp<S>(std::istream&);                      \
  template SfmInstance<S> read_sfm<S>(std::istream&);                     \
  template MinRatioInstance<S> read_min_ratio<S>(std::istream&);          \
  template void write_m2vpi(std::ostream&, const M2vpiSystem<S>&);        \
  template void write_2vpi(std::ostream&, const Tvpi2System<S>&);         \
  template void write_dmdp(std::ostream&, const GainGraph<S>&);           \
  template void write_sfm(std::ostream&, const SfmInstance<S>&);          \
  template void write_min_ratio(std::ostream&, const MinRatioInstance<S>&); \
  template std::string labels_string(const Labels<S>&);

FRACOPT_INSTANTIATE(Rational)
FRACOPT_INSTANTIATE(double)

}  // namespace fracopt
