#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "edibench/metrics.hpp"

namespace edibench {

double exclusivity(const std::vector<double>& values) {
    if (values.empty()) throw Error(ErrorCode::EmptyInput, "exclusivity needs at least one value");
    if (values.size() == 1) return values[0];
    auto top = std::max_element(values.begin(), values.end());
    double sq = 0.0;
    for (auto it = values.begin(); it != values.end(); ++it)
        if (it != top) sq += *it * *it;
    return *top - std::sqrt(sq / static_cast<double>(values.size() - 1));
}

ImpactMatrix impact_intensity(InfoContext& ctx) {
    const std::size_t d = ctx.d(), k = ctx.k();
    ImpactMatrix im;
    im.pairwise_mi = ctx.pairwise_matrix();
    im.intensities = Matrix(d, k);
    for (std::size_t j = 0; j < k; ++j) {
        double joint = ctx.joint(j);
        im.joint_mi.push_back(joint);
        im.factor_entropy.push_back(ctx.factor_entropy(j));
        bool lost = joint < kUncapturedThreshold;
        im.uncaptured.push_back(lost);
        if (lost) continue;
        for (std::size_t i = 0; i < d; ++i) im.intensities(i, j) = im.pairwise_mi(i, j) / joint;
    }
    return im;
}

ImpactMatrix impact_intensity(const Representation& rep, const InfoOptions& options) {
    InfoContext ctx(rep, options);
    return impact_intensity(ctx);
}

std::vector<double> edi_code_disentanglement(const ImpactMatrix& im) {
    std::vector<double> out;
    for (std::size_t i = 0; i < im.intensities.rows; ++i) {
        std::vector<double> row(im.intensities.cols);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] = im.intensities(i, j);
        out.push_back(exclusivity(row));
    }
    return out;
}

double edi_modularity(const ImpactMatrix& im) {
    const std::size_t d = im.intensities.rows, k = im.intensities.cols;
    auto per_code = edi_code_disentanglement(im);
    std::vector<double> s(k, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        std::size_t owner = 0;
        for (std::size_t j = 1; j < k; ++j)
            if (im.intensities(i, j) > im.intensities(i, owner)) owner = j;
        s[owner] += per_code[i];
    }
    double total = 0.0;
    for (double v : s) total += std::min(v, 1.0);
    return total / static_cast<double>(k);
}

double edi_compactness(const ImpactMatrix& im) {
    const std::size_t d = im.intensities.rows, k = im.intensities.cols;
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> col(d);
        for (std::size_t i = 0; i < d; ++i) col[i] = im.intensities(i, j);
        total += exclusivity(col);
    }
    return total / static_cast<double>(k);
}

double edi_explicitness(const ImpactMatrix& im) {
    const std::size_t k = im.joint_mi.size();
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        if (!(im.factor_entropy[j] > 0.0))
            throw Error(ErrorCode::ZeroEntropyFactor, "factor z" + std::to_string(j) + " has zero entropy");
        total += std::clamp(im.joint_mi[j] / im.factor_entropy[j], 0.0, 1.0);
    }
    return total / static_cast<double>(k);
}

std::string impact_matrix_json(const ImpactMatrix& im) {
    nlohmann::json j;
    auto rows = [](const Matrix& m) {
        nlohmann::json out = nlohmann::json::array();
        for (std::size_t r = 0; r < m.rows; ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m(r, c));
            out.push_back(row);
        }
        return out;
    };
    j["intensities"] = rows(im.intensities);
    j["pairwise_mi"] = rows(im.pairwise_mi);
    j["joint_mi"] = im.joint_mi;
    j["factor_entropy"] = im.factor_entropy;
    j["uncaptured"] = im.uncaptured;
    j["code_disentanglement"] = edi_code_disentanglement(im);
    std::vector<double> comp;
    for (std::size_t c = 0; c < im.intensities.cols; ++c) {
        std::vector<double> col;
        for (std::size_t r = 0; r < im.intensities.rows; ++r) col.push_back(im.intensities(r, c));
        comp.push_back(exclusivity(col));
    }
    j["factor_compactness"] = comp;
    j["modularity"] = edi_modularity(im);
    j["compactness"] = edi_compactness(im);
    bool has_entropy = std::all_of(im.factor_entropy.begin(), im.factor_entropy.end(), [](double h) { return h > 0.0; });
    if (has_entropy) j["explicitness"] = edi_explicitness(im);
    return j.dump(2);
}

}  // namespace edibench
