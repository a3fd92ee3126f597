#include "rtistab/report_io.hpp"

#include <fstream>

namespace rtistab {

namespace {

using nlohmann::json;

json poly_to_json(const Polynomial& p) { return json(p.coeffs()); }

Polynomial poly_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) {
    throw InvalidInput("field '" + field + "' must be a non-empty array of reals");
  }
  std::vector<double> c;
  for (const auto& v : j) {
    if (!v.is_number()) {
      throw InvalidInput("field '" + field + "' must contain only numbers");
    }
    c.push_back(v.get<double>());
  }
  return Polynomial(std::move(c));
}

json complex_to_json(const Complex& z) {
  return json{{"re", z.real()}, {"im", z.imag()}};
}

Complex complex_from_json(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im")) {
    throw InvalidInput("field '" + field + "' must be objects with re and im");
  }
  return Complex(j.at("re").get<double>(), j.at("im").get<double>());
}

json tf_to_json(const RationalTF& tf) {
  return json{{"numerator", poly_to_json(tf.num())},
              {"denominator", poly_to_json(tf.den())}};
}

RationalTF tf_from_json(const json& j, const std::string& field) {
  return RationalTF(poly_from_json(j.at("numerator"), field + ".numerator"),
                    poly_from_json(j.at("denominator"), field + ".denominator"));
}

}  // namespace

PlantSpec parse_plant_spec(const json& j) {
  if (!j.is_object()) {
    throw InvalidInput("plant spec must be a JSON object");
  }
  const bool has_coeffs = j.contains("numerator") || j.contains("denominator");
  const bool has_zpk = j.contains("zeros") || j.contains("poles") || j.contains("gain");
  if (has_coeffs == has_zpk) {
    throw InvalidInput(
        "plant spec needs exactly one representation: numerator/denominator or "
        "zeros/poles/gain");
  }

  PlantSpec spec;
  if (j.contains("label")) {
    spec.label = j.at("label").get<std::string>();
  }

  if (has_coeffs) {
    if (!j.contains("numerator") || !j.contains("denominator")) {
      throw InvalidInput("coefficient form needs both numerator and denominator");
    }
    const Polynomial num = poly_from_json(j.at("numerator"), "numerator");
    const Polynomial den = poly_from_json(j.at("denominator"), "denominator");
    if (den.is_zero()) {
      throw InvalidInput("field 'denominator' must not be the zero polynomial");
    }
    spec.tf = RationalTF(num, den);
  } else {
    if (!j.contains("zeros") || !j.contains("poles") || !j.contains("gain")) {
      throw InvalidInput("pole-zero form needs zeros, poles and gain");
    }
    std::vector<Complex> zeros, poles;
    for (const auto& v : j.at("zeros")) {
      zeros.push_back(complex_from_json(v, "zeros"));
    }
    for (const auto& v : j.at("poles")) {
      poles.push_back(complex_from_json(v, "poles"));
    }
    if (poles.empty()) {
      throw InvalidInput("field 'poles' must be non-empty");
    }
    const double gain = j.at("gain").get<double>();
    spec.tf = RationalTF(poly_from_roots(zeros, gain), poly_from_roots(poles, 1.0));
  }

  if (!spec.tf.is_proper()) {
    throw InvalidInput("plant is improper (relative degree negative)");
  }
  return spec;
}

PlantSpec load_plant_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInput("cannot open plant spec file: " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed plant spec: ") + e.what());
  }
  return parse_plant_spec(j);
}

json report_to_json(const DesignResult& result, std::uint64_t rng_seed) {
  json j;
  j["tool_version"] = tool_version();
  j["rng_seed"] = rng_seed;

  json pip;
  pip["satisfied"] = result.pip.satisfied;
  if (result.pip.witness) {
    pip["witness"] = {{"lower_zero", result.pip.witness->first},
                      {"upper_zero", result.pip.witness->second},
                      {"pole_count", result.pip.witness_pole_count}};
  }
  j["pip"] = pip;

  j["factorization"] = {{"N", tf_to_json(result.factorization.N)},
                        {"D", tf_to_json(result.factorization.D)},
                        {"sign_flipped", result.factorization.sign_flipped}};
  j["relative_degree"] = result.factorization.relative_degree;
  j["q"] = result.factorization.q;

  if (result.u_product.premultiplier) {
    j["premultiplier"] = {{"shift", result.u_product.premultiplier->shift},
                          {"M", result.u_product.premultiplier->M}};
  }
  json factors = json::array();
  for (const FactorPair& f : result.u_product.factors) {
    factors.push_back({{"a_num", f.a_num}, {"a_den", f.a_den}, {"m", f.m}});
  }
  j["factors"] = factors;

  j["controller"] = {{"numerator", poly_to_json(result.controller.num())},
                     {"denominator", poly_to_json(result.controller.den())}};

  json clp = json::array();
  for (const Complex& p : result.verification.closed_loop_poles) {
    clp.push_back(complex_to_json(p));
  }
  j["verification"] = {
      {"sigma", result.verification.sigma},
      {"nu", result.verification.nu},
      {"closed_loop_poles", clp},
      {"interpolation_residuals", result.verification.interpolation_residuals},
      {"passed", result.verification.passed}};

  if (result.tune_trace) {
    json trace = json::array();
    for (const TraceEntry& e : result.tune_trace->trace) {
      trace.push_back(
          {{"stage", e.stage}, {"iteration", e.iteration}, {"objective", e.value}});
    }
    j["tune_trace"] = trace;
  }
  return j;
}

LoadedReport report_from_json(const json& j) {
  LoadedReport report;
  report.controller = tf_from_json(j.at("controller"), "controller");

  const json& f = j.at("factorization");
  report.factorization.N = tf_from_json(f.at("N"), "factorization.N");
  report.factorization.D = tf_from_json(f.at("D"), "factorization.D");
  report.factorization.sign_flipped = f.at("sign_flipped").get<bool>();
  report.factorization.relative_degree = j.at("relative_degree").get<int>();
  report.factorization.q = j.at("q").get<int>();
  // Zero groups are re-derived rather than serialized.
  report.factorization = coprime_from_parts(report.factorization.N,
                                            report.factorization.D);

  report.u.integerized = true;
  if (j.contains("premultiplier")) {
    report.u.premultiplier =
        Premultiplier{j.at("premultiplier").at("shift").get<double>(),
                      j.at("premultiplier").at("M").get<double>()};
  }
  for (const auto& v : j.at("factors")) {
    report.u.factors.push_back(FactorPair{v.at("a_num").get<double>(),
                                          v.at("a_den").get<double>(),
                                          v.at("m").get<double>()});
  }

  const json& ver = j.at("verification");
  report.verification.sigma = ver.at("sigma").get<double>();
  report.verification.nu = ver.at("nu").get<int>();
  report.verification.passed = ver.at("passed").get<bool>();
  for (const auto& v : ver.at("closed_loop_poles")) {
    report.verification.closed_loop_poles.push_back(
        complex_from_json(v, "closed_loop_poles"));
  }
  if (ver.contains("interpolation_residuals")) {
    for (const auto& v : ver.at("interpolation_residuals")) {
      report.verification.interpolation_residuals.push_back(v.get<double>());
    }
  }

  report.pip.satisfied = j.at("pip").at("satisfied").get<bool>();
  return report;
}

LoadedReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInput("cannot open report file: " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed report: ") + e.what());
  }
  try {
    return report_from_json(j);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("report missing required fields: ") + e.what());
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw InvalidInput("cannot write to " + tmp.string());
    }
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

void write_json_atomic(const std::filesystem::path& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

std::string tool_version() { return "0.1.0"; }

}  // namespace rtistab
