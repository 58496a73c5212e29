#include "rkpr/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "rkpr/rng.hpp"

namespace rkpr {

using nlohmann::json;

json vector_to_json(ConstSpan v) {
  json out = json::array();
  for (const Complex& c : v) out.push_back({c.real(), c.imag()});
  return out;
}

CVector vector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("vector: expected a nonempty array");
  std::vector<Complex> v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw std::invalid_argument("vector: entries must be [re, im]");
    v.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return CVector(std::move(v));
}

json ensemble_to_json(const Ensemble& e, bool include_rows, const Measurements* values) {
  if (!include_rows && !e.provenance()) {
    throw std::invalid_argument("ensemble_to_json: ensemble has no provenance; store rows");
  }
  json j = {{"format", kContainerFormat},
            {"version", kContainerVersion},
            {"generator", RngStream::kGeneratorId},
            {"m", e.m()},
            {"n", e.n()},
            {"model", to_string(e.model())}};
  if (const auto& p = e.provenance()) {
    j["seed"] = p->seed;
    j["stream_id"] = p->stream_id;
    j["offset"] = p->offset;
  }
  if (include_rows) j["rows"] = vector_to_json(e.rows());
  if (values) {
    if (values->size() != e.m()) throw std::invalid_argument("ensemble_to_json: values size mismatch");
    j["values"] = std::vector<double>(values->values().begin(), values->values().end());
  }
  return j;
}

Ensemble ensemble_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kContainerFormat) {
      throw std::invalid_argument("ensemble_from_json: unknown format");
    }
    if (j.at("version").get<int>() != kContainerVersion) {
      throw std::invalid_argument("ensemble_from_json: unsupported version");
    }
    const auto m = j.at("m").get<std::size_t>();
    const auto n = j.at("n").get<std::size_t>();
    const Model model = parse_model(j.at("model").get<std::string>());
    std::optional<Provenance> prov;
    if (j.contains("seed")) {
      prov = Provenance{j.at("seed").get<std::uint64_t>(), j.at("stream_id").get<std::uint64_t>(),
                        j.at("offset").get<std::uint64_t>()};
    }
    if (j.contains("rows")) {
      const CVector flat = vector_from_json(j.at("rows"));
      return Ensemble(m, n, model, flat.entries(), prov);
    }
    if (!prov) throw std::invalid_argument("ensemble_from_json: neither rows nor provenance present");
    if (j.at("generator").get<std::string>() != RngStream::kGeneratorId) {
      throw std::invalid_argument("ensemble_from_json: generated by a different generator");
    }
    return regenerate_ensemble(m, n, model, *prov);
  } catch (const json::exception& ex) {
    throw std::invalid_argument(std::string("ensemble_from_json: ") + ex.what());
  }
}

Measurements measurements_from_json(const json& j) {
  if (!j.contains("values")) throw std::invalid_argument("measurements_from_json: no values");
  try {
    return Measurements(j.at("values").get<std::vector<double>>());
  } catch (const json::exception& ex) {
    throw std::invalid_argument(std::string("measurements_from_json: ") + ex.what());
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace rkpr
