#include "cdop/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace cdop::io {

namespace {

[[noreturn]] void fail(const std::string& at, const std::string& what) { throw LocatedParseError(at.empty() ? "/" : at, what); }

std::string child(const std::string& at, const std::string& key) { return at + "/" + key; }
std::string child(const std::string& at, std::size_t k) { return at + "/" + std::to_string(k); }

const Json& field(const Json& j, const std::string& key, const std::string& at) {
  if (!j.is_object()) fail(at, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(child(at, key), "missing field");
  return *it;
}

const Json& array(const Json& j, const std::string& at, std::size_t expect = static_cast<std::size_t>(-1)) {
  if (!j.is_array()) fail(at, "expected an array");
  if (expect != static_cast<std::size_t>(-1) && j.size() != expect) {
    fail(at, "expected " + std::to_string(expect) + " elements, found " + std::to_string(j.size()));
  }
  return j;
}

double number(const Json& j, const std::string& at) {
  if (!j.is_number()) fail(at, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(at, "number is not finite");
  return x;
}

long integer(const Json& j, const std::string& at) {
  if (!j.is_number_integer()) fail(at, "expected an integer");
  return j.get<long>();
}

std::size_t count(const Json& j, const std::string& at, std::size_t lo = 0) {
  const long x = integer(j, at);
  if (x < static_cast<long>(lo)) fail(at, "expected an integer >= " + std::to_string(lo));
  return static_cast<std::size_t>(x);
}

int level_field(const Json& j, const std::string& at) {
  const long v = integer(field(j, "v", at), child(at, "v"));
  if (v < 0 || v > 6) fail(child(at, "v"), "level must lie in 0..6");
  return static_cast<int>(v);
}

std::vector<double> numbers(const Json& j, const std::string& at) {
  std::vector<double> out;
  for (std::size_t k = 0; k < array(j, at).size(); ++k) out.push_back(number(j[k], child(at, k)));
  return out;
}

// Writes an entry at the given slot of m from any accepted encoding.
void read_entry(const Json& j, CdMatrix& m, std::size_t r, std::size_t c, const std::string& at) {
  const std::size_t full = m.entry_size(), half = full / 2;
  auto dst = m.raw(r, c);
  if (j.is_array()) {
    const std::vector<double> x = numbers(j, at);
    if (x.size() != half && x.size() != full) {
      fail(at, "entry needs " + std::to_string(half) + " or " + std::to_string(full) + " coordinates");
    }
    std::copy(x.begin(), x.end(), dst.begin());
    return;
  }
  if (j.is_object() && j.contains("re")) {
    const CdComplex z = complex_from_json(j, m.level(), at);
    std::copy(z.re().coords().begin(), z.re().coords().end(), dst.begin());
    std::copy(z.im().coords().begin(), z.im().coords().end(), dst.begin() + static_cast<long>(half));
    return;
  }
  if (j.is_object()) {
    const CdNumber a = number_from_json(j, at);
    if (a.level() != m.level()) fail(at, "entry level differs from the document level");
    std::copy(a.coords().begin(), a.coords().end(), dst.begin());
    return;
  }
  fail(at, "expected a coordinate array or an algebra element");
}

Json trig_to_json(const TrigPoly& p) { return Json{{"cos", p.cos_coeffs}, {"sin", p.sin_coeffs}}; }

TrigPoly trig_from_json(const Json& j, const std::string& at) {
  if (!j.is_object()) fail(at, "expected an object");
  TrigPoly p;
  if (j.contains("cos")) p.cos_coeffs = numbers(j["cos"], child(at, "cos"));
  if (j.contains("sin")) p.sin_coeffs = numbers(j["sin"], child(at, "sin"));
  return p;
}

}  // namespace

Json to_json(const CdNumber& a) {
  return Json{{"v", a.level()}, {"coords", std::vector<double>(a.coords().begin(), a.coords().end())}};
}

CdNumber number_from_json(const Json& j, const std::string& at) {
  const int v = level_field(j, at);
  const std::vector<double> c = numbers(field(j, "coords", at), child(at, "coords"));
  if (c.size() != (std::size_t{1} << v)) fail(child(at, "coords"), "expected 2^v coordinates");
  return CdNumber(v, c);
}

Json to_json(const CdComplex& a) { return Json{{"re", to_json(a.re())}, {"im", to_json(a.im())}}; }

CdComplex complex_from_json(const Json& j, int level, const std::string& at) {
  const CdNumber re = number_from_json(field(j, "re", at), child(at, "re"));
  CdNumber im(re.level());
  if (j.contains("im")) im = number_from_json(j["im"], child(at, "im"));
  if (re.level() != im.level() || (level >= 0 && re.level() != level)) fail(at, "component levels disagree");
  return {re, im};
}

Json to_json(const CdMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const auto e = m.raw(r, c);
      row.push_back(std::vector<double>(e.begin(), e.end()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

CdMatrix matrix_from_json(const Json& j, int level, std::size_t rows, std::size_t cols, const std::string& at) {
  CdMatrix m(level, rows, cols);
  array(j, at, rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string ar = child(at, r);
    array(j[r], ar, cols);
    for (std::size_t c = 0; c < cols; ++c) read_entry(j[r][c], m, r, c, child(ar, c));
  }
  return m;
}

Json to_json(const BandPeriodicOp& b) {
  Json blocks = Json::array();
  const long K = static_cast<long>(b.band());
  for (std::size_t jr = 0; jr < b.period(); ++jr) {
    Json row = Json::array();
    for (long m = -K; m <= K; ++m) row.push_back(to_json(b.block(jr, m)));
    blocks.push_back(std::move(row));
  }
  return Json{{"v", b.level()}, {"d", b.dim()}, {"n", b.period()}, {"K", b.band()}, {"blocks", std::move(blocks)}};
}

BandPeriodicOp op_from_json(const Json& j, const std::string& at) {
  if (!j.is_object() || j.empty()) fail(at, "expected an operator object with v, d, n, K, blocks");
  const int v = level_field(j, at);
  const std::size_t d = count(field(j, "d", at), child(at, "d"), 1);
  const std::size_t n = count(field(j, "n", at), child(at, "n"), 1);
  const std::size_t K = count(field(j, "K", at), child(at, "K"));
  const std::string ab = child(at, "blocks");
  const Json& bl = array(field(j, "blocks", at), ab, n);
  std::vector<CdMatrix> blocks;
  blocks.reserve(n * (2 * K + 1));
  for (std::size_t jr = 0; jr < n; ++jr) {
    const std::string aj = child(ab, jr);
    array(bl[jr], aj, 2 * K + 1);
    for (std::size_t m = 0; m < 2 * K + 1; ++m) blocks.push_back(matrix_from_json(bl[jr][m], v, d, d, child(aj, m)));
  }
  return BandPeriodicOp(v, d, n, K, std::move(blocks));
}

Json to_json(const SeqFin& x) {
  Json values = Json::array();
  for (const auto& [l, y] : x.values()) {
    Json comps = Json::array();
    for (std::size_t k = 0; k < x.dim(); ++k) {
      const auto e = y.as_column().raw(k, 0);
      comps.push_back(std::vector<double>(e.begin(), e.end()));
    }
    values.push_back(Json{{"l", l}, {"y", std::move(comps)}});
  }
  return Json{{"v", x.level()}, {"d", x.dim()}, {"values", std::move(values)}};
}

SeqFin seq_from_json(const Json& j, const std::string& at) {
  const int v = level_field(j, at);
  const std::size_t d = count(field(j, "d", at), child(at, "d"), 1);
  SeqFin x(v, d);
  const std::string av = child(at, "values");
  const Json& vals = array(field(j, "values", at), av);
  for (std::size_t k = 0; k < vals.size(); ++k) {
    const std::string ak = child(av, k);
    const long l = integer(field(vals[k], "l", ak), child(ak, "l"));
    const std::string ay = child(ak, "y");
    const Json& y = array(field(vals[k], "y", ak), ay, d);
    CdMatrix col(v, d, 1);
    for (std::size_t c = 0; c < d; ++c) read_entry(y[c], col, c, 0, child(ay, c));
    x.set(l, VectorY::from_column(std::move(col)));
  }
  return x;
}

Json to_json(const PeriodicSeries& x) {
  Json coeffs = Json::array();
  for (const auto& [n, a] : x.coeffs) coeffs.push_back(Json{{"n", n}, {"matrix", to_json(a)}});
  return Json{{"v", x.level}, {"d", x.d}, {"coeffs", std::move(coeffs)}};
}

PeriodicSeries series_from_json(const Json& j, const std::string& at) {
  PeriodicSeries x;
  x.level = level_field(j, at);
  x.d = count(field(j, "d", at), child(at, "d"), 1);
  const std::string ac = child(at, "coeffs");
  const Json& cs = array(field(j, "coeffs", at), ac);
  if (cs.empty()) fail(ac, "series needs at least one coefficient");
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const std::string ak = child(ac, k);
    const long n = integer(field(cs[k], "n", ak), child(ak, "n"));
    CdMatrix a = matrix_from_json(field(cs[k], "matrix", ak), x.level, x.d, x.d, child(ak, "matrix"));
    if (!x.coeffs.emplace(n, std::move(a)).second) fail(child(ak, "n"), "duplicate coefficient index");
  }
  return x;
}

Json to_json(const LineFunction& f) {
  Json values = Json::array();
  for (const auto& v : f.values) values.push_back(to_json(v));
  return Json{{"v", f.level}, {"d", f.d}, {"t0", f.t0}, {"h", f.h}, {"values", std::move(values)}};
}

LineFunction line_from_json(const Json& j, const std::string& at) {
  LineFunction f;
  f.level = level_field(j, at);
  f.d = count(field(j, "d", at), child(at, "d"), 1);
  f.t0 = number(field(j, "t0", at), child(at, "t0"));
  f.h = number(field(j, "h", at), child(at, "h"));
  if (!(f.h > 0)) fail(child(at, "h"), "step must be positive");
  const std::string av = child(at, "values");
  const Json& vals = array(field(j, "values", at), av);
  if (vals.empty()) fail(av, "function needs at least one sample");
  for (std::size_t k = 0; k < vals.size(); ++k) f.values.push_back(matrix_from_json(vals[k], f.level, f.d, f.d, child(av, k)));
  return f;
}

KernelSpec kernel_from_json(const Json& j, const std::string& at) {
  if (!j.is_object()) fail(at, "expected a kernel object");
  KernelSpec k;
  k.w = j.contains("w") ? static_cast<int>(integer(j["w"], child(at, "w"))) : 2;
  k.v = j.contains("v") ? level_field(j, at) : 2;
  k.d = count(field(j, "d", at), child(at, "d"), 1);
  k.axes.clear();
  const std::string ax = child(at, "axes");
  const Json& axes = array(field(j, "axes", at), ax);
  for (std::size_t a = 0; a < axes.size(); ++a) k.axes.push_back(count(axes[a], child(ax, a)));
  k.periods = numbers(field(j, "periods", at), child(at, "periods"));
  if (k.periods.size() != k.axes.size()) fail(child(at, "periods"), "one period per active axis");
  if (j.contains("c1") && !j["c1"].is_null()) k.c1 = number(j["c1"], child(at, "c1"));

  const Json& kind = field(j, "kind", at);
  if (!kind.is_string()) fail(child(at, "kind"), "expected a string");
  const std::string s = kind.get<std::string>();
  if (s == "zero") {
    k.kind = KernelKind::zero;
  } else if (s == "difference") {
    k.kind = KernelKind::difference;
    k.coeff = matrix_from_json(field(j, "coeff", at), k.v, k.d, k.d, child(at, "coeff"));
    k.weight = number(field(j, "weight", at), child(at, "weight"));
    const std::string prof = j.value("profile", std::string("gaussian"));
    if (prof == "gaussian") {
      k.profile = Profile::gaussian;
    } else if (prof == "bump") {
      k.profile = Profile::bump;
    } else {
      fail(child(at, "profile"), "unknown profile '" + prof + "'");
    }
    k.widths = numbers(field(j, "widths", at), child(at, "widths"));
    if (k.widths.size() != k.axes.size()) fail(child(at, "widths"), "one width per active axis");
  } else if (s == "separable") {
    k.kind = KernelKind::separable;
    const std::string at_terms = child(at, "terms");
    const Json& terms = array(field(j, "terms", at), at_terms);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const std::string a = child(at_terms, t);
      SeparableTerm term;
      term.coeff = matrix_from_json(field(terms[t], "coeff", a), k.v, k.d, k.d, child(a, "coeff"));
      for (const char* side : {"phi", "psi"}) {
        const std::string as = child(a, side);
        const Json& ps = array(field(terms[t], side, a), as, k.axes.size());
        auto& dst = std::string(side) == "phi" ? term.phi : term.psi;
        for (std::size_t p = 0; p < ps.size(); ++p) dst.push_back(trig_from_json(ps[p], child(as, p)));
      }
      term.reach = terms[t].contains("reach") ? integer(terms[t]["reach"], child(a, "reach")) : 0;
      k.terms.push_back(std::move(term));
    }
  } else if (s == "table") {
    k.kind = KernelKind::table;
    k.table_grid = count(field(j, "grid", at), child(at, "grid"), 1);
    std::size_t P = 1;
    for (std::size_t a = 0; a < k.axes.size(); ++a) P *= k.table_grid;
    const std::string ae = child(at, "entries");
    const Json& es = array(field(j, "entries", at), ae);
    for (std::size_t e = 0; e < es.size(); ++e) {
      const std::string a = child(ae, e);
      const std::string am = child(a, "m");
      const Json& mj = array(field(es[e], "m", a), am, k.axes.size());
      MultiIndex m;
      for (std::size_t q = 0; q < mj.size(); ++q) m.push_back(integer(mj[q], child(am, q)));
      CdMatrix block = matrix_from_json(field(es[e], "matrix", a), k.v, P * k.d, P * k.d, child(a, "matrix"));
      if (!k.table.emplace(std::move(m), std::move(block)).second) fail(am, "duplicate cell offset");
    }
  } else {
    fail(child(at, "kind"), "unknown kernel kind '" + s + "'");
  }
  return k;
}

Json to_json(const KernelSpec& k) {
  Json j{{"w", k.w}, {"v", k.v}, {"d", k.d}, {"axes", k.axes}, {"periods", k.periods}};
  if (k.c1 >= 0) j["c1"] = k.c1;
  switch (k.kind) {
    case KernelKind::zero:
      j["kind"] = "zero";
      break;
    case KernelKind::difference:
      j["kind"] = "difference";
      j["coeff"] = to_json(k.coeff);
      j["weight"] = k.weight;
      j["profile"] = k.profile == Profile::gaussian ? "gaussian" : "bump";
      j["widths"] = k.widths;
      break;
    case KernelKind::separable: {
      j["kind"] = "separable";
      Json terms = Json::array();
      for (const auto& t : k.terms) {
        Json phi = Json::array(), psi = Json::array();
        for (const auto& p : t.phi) phi.push_back(trig_to_json(p));
        for (const auto& p : t.psi) psi.push_back(trig_to_json(p));
        terms.push_back(Json{{"coeff", to_json(t.coeff)}, {"phi", phi}, {"psi", psi}, {"reach", t.reach}});
      }
      j["terms"] = std::move(terms);
      break;
    }
    case KernelKind::table: {
      j["kind"] = "table";
      j["grid"] = k.table_grid;
      Json es = Json::array();
      for (const auto& [m, block] : k.table) es.push_back(Json{{"m", m}, {"matrix", to_json(block)}});
      j["entries"] = std::move(es);
      break;
    }
    case KernelKind::custom:
      j["kind"] = "custom";
      break;
  }
  return j;
}

Json to_json(const Error& e) {
  Json w = Json::object();
  for (const auto& [key, value] : e.witness()) w[key] = value;
  Json j{{"kind", e.kind()},
         {"class", e.error_class() == ErrorClass::precondition ? "precondition" : "numerical"},
         {"message", e.what()},
         {"witness", std::move(w)}};
  if (const auto* p = dynamic_cast<const LocatedParseError*>(&e)) j["locator"] = p->locator();
  return j;
}

Json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw LocatedParseError(p.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw LocatedParseError("/", "empty document");
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw LocatedParseError("byte " + std::to_string(e.byte), "malformed JSON");
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_atomic(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw PreconditionError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw PreconditionError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

}  // namespace cdop::io
