#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <optional>

#include "latsch/field.hpp"
#include "latsch/site.hpp"

namespace latsch {

struct NullspaceCertificate {
    bool trivial = true;
    double min_singular_value = 0;
    double scale = 0;                 // largest singular value
    int rows = 0, cols = 0;
    std::optional<FieldR> witness;    // only when a nonzero kernel vector shows up
};

/// Constrained linear system for a finitely supported solution of
/// (-Delta_disc + V - lambda) u = 0 with supp(u) inside `support_box`.
/// Unknowns are the field values in the box; equations live on the box grown
/// by one (outside that, every stencil entry vanishes identically). The
/// hyperplane recursion says the only solution is zero, so the reported
/// minimum singular value should stay well away from the kernel threshold.
inline NullspaceCertificate nullspace_certificate(const FieldR& V, double lambda,
                                                  const Box& support_box,
                                                  double kernel_threshold = 1e-8) {
    std::vector<Site> cols;
    support_box.for_each([&](const Site& n) { cols.push_back(n); });
    std::map<Site, int> colidx;
    for (size_t i = 0; i < cols.size(); ++i) colidx[cols[i]] = static_cast<int>(i);

    std::vector<Site> rows;
    support_box.grown(1).for_each([&](const Site& n) { rows.push_back(n); });

    const int d = support_box.dim();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                              static_cast<Eigen::Index>(cols.size()));
    for (size_t r = 0; r < rows.size(); ++r) {
        const Site& n = rows[r];
        auto it = colidx.find(n);
        if (it != colidx.end())
            M(static_cast<Eigen::Index>(r), it->second) = 0.5 * d + V.at(n) - lambda;
        for (const Site& m : neighbors(n)) {
            auto jt = colidx.find(m);
            if (jt != colidx.end()) M(static_cast<Eigen::Index>(r), jt->second) = -0.25;
        }
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();

    NullspaceCertificate cert;
    cert.rows = static_cast<int>(rows.size());
    cert.cols = static_cast<int>(cols.size());
    cert.scale = sv(0);
    cert.min_singular_value = sv(sv.size() - 1);
    cert.trivial = cert.min_singular_value > kernel_threshold * cert.scale;
    if (!cert.trivial) {
        FieldR w(d);
        Eigen::VectorXd v = svd.matrixV().col(sv.size() - 1);
        for (size_t i = 0; i < cols.size(); ++i)
            if (std::abs(v(static_cast<Eigen::Index>(i))) > 1e-14)
                w.set(cols[i], v(static_cast<Eigen::Index>(i)));
        cert.witness = std::move(w);
    }
    return cert;
}

}  // namespace latsch
