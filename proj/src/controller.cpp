#include "exmpc/controller.hpp"

#include "exmpc/error.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace exmpc {

using json = nlohmann::json;

ExplicitController::ExplicitController(std::vector<CriticalRegion> regions, int theta_dim, int n_u,
                                       ControllerMeta meta)
    : regions_(std::move(regions)), theta_dim_(theta_dim), n_u_(n_u), meta_(std::move(meta)) {
    if (theta_dim_ <= 0 || n_u_ <= 0) throw Error(ErrorKind::invalid_argument, "controller dimensions must be positive");
    if (meta_.u_min.size() != n_u_ || meta_.u_max.size() != n_u_)
        throw Error(ErrorKind::dimension_mismatch, "input bounds do not match n_u");
    for (const auto& r : regions_) {
        if (r.region.dim() != theta_dim_ || r.F.rows() != n_u_ || r.F.cols() != theta_dim_ || r.g.size() != n_u_)
            throw Error(ErrorKind::dimension_mismatch, "critical region dimensions do not match the controller");
    }
}

int ExplicitController::locate(const Vector& theta) const {
    if (theta.size() != theta_dim_)
        throw Error(ErrorKind::dimension_mismatch,
                    "theta has size " + std::to_string(theta.size()) + ", expected " + std::to_string(theta_dim_));
    for (std::size_t i = 0; i < regions_.size(); ++i)
        if (regions_[i].region.contains(theta, tol::membership)) return static_cast<int>(i);
    return -1;
}

Evaluation ExplicitController::evaluate(const Vector& theta) const {
    const int idx = locate(theta);
    if (idx < 0) throw Error(ErrorKind::parameter_not_covered, "no critical region contains theta");
    Vector u = regions_[idx].law(theta);
    for (int i = 0; i < n_u_; ++i) {
        const double clipped = std::clamp(u(i), meta_.u_min(i), meta_.u_max(i));
        if (std::abs(clipped - u(i)) > 1e-6)
            throw Error(ErrorKind::constraint_violation,
                        "region " + std::to_string(idx) + " law leaves the input box by " +
                            std::to_string(std::abs(clipped - u(i))));
        u(i) = clipped;
    }
    return {u, idx};
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json to_json(const Matrix& m) {
    json a = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Vector(m.row(r).transpose())));
    return a;
}

Vector vector_from(const json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
    return v;
}

Matrix matrix_from(const json& j, Eigen::Index cols) {
    Matrix m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const json& row = j.at(r);
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw Error(ErrorKind::dimension_mismatch, "ragged matrix in controller document");
        for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), c) = row.at(c).get<double>();
    }
    return m;
}

json body_of(const ExplicitController& ctrl) {
    const ControllerMeta& m = ctrl.meta();
    json body;
    body["format_version"] = kFormatVersion;
    body["theta_dim"] = ctrl.theta_dim();
    body["n_u"] = ctrl.n_u();
    body["meta"] = {{"Qy", to_json(m.Qy)},
                    {"QI", to_json(m.QI)},
                    {"R", to_json(m.R)},
                    {"N", m.N},
                    {"model_fingerprint", m.model_fingerprint},
                    {"u_min", to_json(m.u_min)},
                    {"u_max", to_json(m.u_max)}};
    json regions = json::array();
    for (const auto& r : ctrl.regions()) {
        regions.push_back({{"H", to_json(r.region.A())},
                           {"h", to_json(r.region.b())},
                           {"F", to_json(r.F)},
                           {"g", to_json(r.g)},
                           {"active_set", r.active_set}});
    }
    body["regions"] = std::move(regions);
    body["index"] = nullptr;
    return body;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorKind::io_error, "SHA-256 digest failed");
    std::ostringstream out;
    out << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
    return out.str();
}

std::string model_fingerprint(const AugmentedModel& model) {
    json j = {{"At", to_json(model.At)},
              {"Bt", to_json(model.Bt)},
              {"Ct", to_json(model.Ct)},
              {"Et", to_json(model.Et)},
              {"Ts", model.Ts}};
    return sha256_hex(j.dump());
}

std::string to_document(const ExplicitController& ctrl) {
    json body = body_of(ctrl);
    const std::string checksum = sha256_hex(body.dump());
    body["checksum"] = checksum;
    return body.dump(1) + "\n";
}

ExplicitController from_document(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error(ErrorKind::checksum_mismatch, "controller document is not parsable (truncated or corrupt)");
    if (!doc.contains("format_version") || !doc["format_version"].is_string() ||
        doc["format_version"].get<std::string>() != kFormatVersion)
        throw Error(ErrorKind::format_version_mismatch,
                    "expected format_version " + std::string(kFormatVersion));
    if (!doc.contains("checksum") || !doc["checksum"].is_string())
        throw Error(ErrorKind::checksum_mismatch, "controller document has no checksum");
    const std::string stored = doc["checksum"].get<std::string>();
    doc.erase("checksum");
    if (sha256_hex(doc.dump()) != stored) throw Error(ErrorKind::checksum_mismatch, "controller checksum does not match");

    try {
        const int theta_dim = doc.at("theta_dim").get<int>();
        const int n_u = doc.at("n_u").get<int>();
        const json& jm = doc.at("meta");
        ControllerMeta meta;
        meta.Qy = vector_from(jm.at("Qy"));
        meta.QI = vector_from(jm.at("QI"));
        meta.R = vector_from(jm.at("R"));
        meta.N = jm.at("N").get<int>();
        meta.model_fingerprint = jm.at("model_fingerprint").get<std::string>();
        meta.u_min = vector_from(jm.at("u_min"));
        meta.u_max = vector_from(jm.at("u_max"));

        std::vector<CriticalRegion> regions;
        for (const json& jr : doc.at("regions")) {
            CriticalRegion r;
            // Renormalizing would perturb the last bit of stored rows.
            Matrix A = matrix_from(jr.at("H"), theta_dim);
            Vector b = vector_from(jr.at("h"));
            if (A.rows() != b.size()) throw Error(ErrorKind::dimension_mismatch, "region H/h rows differ");
            r.region = Polyhedron::from_normalized(std::move(A), std::move(b));
            r.F = matrix_from(jr.at("F"), theta_dim);
            r.g = vector_from(jr.at("g"));
            r.active_set = jr.at("active_set").get<IndexSet>();
            regions.push_back(std::move(r));
        }
        return ExplicitController(std::move(regions), theta_dim, n_u, std::move(meta));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::config_error, std::string("malformed controller document: ") + e.what());
    }
}

void save(const ExplicitController& ctrl, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io_error, "cannot open " + path.string() + " for writing");
    out << to_document(ctrl);
    if (!out) throw Error(ErrorKind::io_error, "write failed for " + path.string());
}

ExplicitController load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_document(buf.str());
}

}  // namespace exmpc
