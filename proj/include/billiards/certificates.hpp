#ifndef BILLIARDS_CERTIFICATES_HPP
#define BILLIARDS_CERTIFICATES_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "billiards/errors.hpp"
#include "billiards/geometry.hpp"
#include "billiards/outer_billiard.hpp"

namespace billiards {

struct ShearRotationLetter {
    double alpha = 0.0; // rotation angle, in (0, pi)
    double shear = 0.0; // positive shear coefficient
};

// Word R(alpha_n) A_n ... R(alpha_1) A_1 with A_i = [[1, s_i], [0, 1]].
// Letters are stored in application order: letters[0] acts first.
class ShearRotationWord {
public:
    explicit ShearRotationWord(std::vector<ShearRotationLetter> letters)
        : letters_(std::move(letters)) {
        if (letters_.empty())
            throw InvalidWord("word must contain at least one letter");
        for (std::size_t i = 0; i < letters_.size(); ++i) {
            if (!(letters_[i].alpha > 0.0 && letters_[i].alpha < kPi))
                throw InvalidWord("alpha_" + std::to_string(i + 1) + " = " +
                                  std::to_string(letters_[i].alpha) + " is outside (0, pi)");
            if (!(letters_[i].shear > 0.0))
                throw InvalidWord("s_" + std::to_string(i + 1) + " = " +
                                  std::to_string(letters_[i].shear) + " is not positive");
        }
    }

    const std::vector<ShearRotationLetter>& letters() const { return letters_; }
    std::size_t size() const { return letters_.size(); }

    double alpha_sum() const {
        double s = 0.0;
        for (const auto& l : letters_) s += l.alpha;
        return s;
    }

private:
    std::vector<ShearRotationLetter> letters_;
};

inline Mat2 word_product(const ShearRotationWord& word) {
    Mat2 product = Mat2::Identity();
    for (const auto& l : word.letters())
        product = (rotation(l.alpha) * shear(l.shear) * product).eval();
    return product;
}

// The constant word with alpha = (n-2) pi / n and s = 4 cot(2 pi / n), whose
// n-fold product is the identity for every n >= 5. For n = 3 the shear would
// be negative and for n = 4 it would vanish, so those periods are rejected.
inline ShearRotationWord identity_family(int n) {
    if (n <= 4)
        throw InvalidPeriod("identity family needs n >= 5 (cot(2 pi / n) <= 0 for n <= 4), got n=" +
                            std::to_string(n));
    const double alpha = (n - 2) * kPi / n;
    const double s = 4.0 * std::cos(kTwoPi / n) / std::sin(kTwoPi / n);
    return ShearRotationWord(std::vector<ShearRotationLetter>(
        static_cast<std::size_t>(n), ShearRotationLetter{alpha, s}));
}

// Quasi-direction of a halfline through the origin:
//   0 = positive x-axis, 1 = upper halfplane, 2 = negative x-axis,
//   3 = lower halfplane.
// The y-component of the unit direction decides halfplane membership with a
// 1e-14 guard for the axis cases.
inline int quasi_direction(const Vec2& direction) {
    const Vec2 d = direction.normalized();
    if (std::abs(d.y()) < 1e-14) return d.x() > 0.0 ? 0 : 2;
    return d.y() > 0.0 ? 1 : 3;
}

struct QuasiDirectionStep {
    enum class Stage { Shear, Rotation };
    Stage stage = Stage::Shear;
    int index = 0;           // 1-based letter index
    double lifted_angle = 0; // direction angle of the tracked halfline, lifted
    int quasi = 0;
};

struct QuasiDirectionTrace {
    std::vector<QuasiDirectionStep> steps;
    double total_rotation = 0.0; // final lifted angle; the halfline starts at 0
};

enum class CertificateVerdict { ProvenNotIdentity, Inconclusive };

inline const char* to_string(CertificateVerdict v) {
    return v == CertificateVerdict::ProvenNotIdentity ? "proven_not_identity" : "inconclusive";
}

struct IdentityCertificate {
    CertificateVerdict verdict = CertificateVerdict::Inconclusive;
    QuasiDirectionTrace trace;
    double alpha_sum = 0.0;
    double product_distance = 0.0; // ||word_product - Id||_max cross-check
};

// Tracks the halfline spanned by (1,0) through A_1, R(alpha_1), ...,
// A_n, R(alpha_n) with a continuously lifted direction angle. Shears rotate
// the halfline clockwise (or fix it) and preserve its quasi-direction;
// rotations advance the lift by exactly alpha_i. When sum alpha_i <= 2 pi the
// lift therefore ends strictly below 2 pi and the halfline cannot have
// completed the quasi-direction cycle 0,1,2,3,0 that returning to the
// positive x-axis after a full turn would require, so the product is not the
// identity.
inline IdentityCertificate certify_not_identity(const ShearRotationWord& word) {
    IdentityCertificate cert;
    cert.alpha_sum = word.alpha_sum();

    Vec2 dir(1.0, 0.0);
    double lift = 0.0;
    int idx = 0;
    for (const auto& l : word.letters()) {
        ++idx;
        const Vec2 sheared = shear(l.shear) * dir;
        lift += turn_angle(dir, sheared);
        dir = sheared.normalized();
        cert.trace.steps.push_back(
            {QuasiDirectionStep::Stage::Shear, idx, lift, quasi_direction(dir)});

        const Vec2 rotated = rotation(l.alpha) * dir;
        lift += turn_angle(dir, rotated);
        dir = rotated.normalized();
        cert.trace.steps.push_back(
            {QuasiDirectionStep::Stage::Rotation, idx, lift, quasi_direction(dir)});
    }
    cert.trace.total_rotation = lift;

    const Mat2 p = word_product(word);
    cert.product_distance = (p - Mat2::Identity()).cwiseAbs().maxCoeff();
    cert.verdict = cert.alpha_sum <= kTwoPi ? CertificateVerdict::ProvenNotIdentity
                                            : CertificateVerdict::Inconclusive;
    return cert;
}

// Winding identity sum alpha_i = pi (n - 2m) for a closed (n, m)-orbit.
inline bool winding_sum_check(const OuterOrbit& orbit) {
    const double expected = kPi * (orbit.period() - 2 * orbit.winding);
    return std::abs(orbit.alpha_sum() - expected) < 1e-8;
}

// The shear-rotation word of a closed outer billiard orbit; its product is
// the orbit's monodromy.
inline ShearRotationWord word_from_orbit(const CurveModel& curve, const OuterOrbit& orbit) {
    const std::vector<double> shears = orbit_shears(curve, orbit);
    std::vector<ShearRotationLetter> letters(shears.size());
    for (std::size_t i = 0; i < shears.size(); ++i)
        letters[i] = {orbit.alphas[i], shears[i]};
    return ShearRotationWord(std::move(letters));
}

} // namespace billiards

#endif
