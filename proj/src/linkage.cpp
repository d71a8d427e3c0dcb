#include "morphwing/linkage.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "morphwing/error.hpp"
#include "morphwing/units.hpp"

namespace morphwing {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::InvalidInput, what);
}

void validate_pose(const PoseConstraint& pose, const char* name) {
    auto angle_ok = [](double deg) { return deg > 0.0 && deg < 180.0; };
    const std::string prefix = std::string(name) + ": ";
    if (pose.theta_s) require(angle_ok(*pose.theta_s), prefix + "theta_s must be in (0, 180) deg");
    require(angle_ok(pose.theta_e), prefix + "theta_e must be in (0, 180) deg");
    require(angle_ok(pose.theta_w), prefix + "theta_w must be in (0, 180) deg");
    require(pose.x_A > 0.0, prefix + "x_A must be positive");
}

// Wraps `angle` onto the 2*pi-equivalent value nearest to `reference`.
double unwrap_near(double angle, double reference) {
    return angle + 2.0 * kPi * std::round((reference - angle) / (2.0 * kPi));
}

// Common sub-expressions of the closure equations for one pose.
struct ClosureTerms {
    double X = 0.0; // e*cos(theta_3)
    double Y = 0.0; // e*sin(theta_3)
    double r14 = 0.0;
};

ClosureTerms closure_terms(double a, double d, double i, double b, double l_h, double ts,
                           double te, double x_A) {
    const double c = l_h - d;
    const double ab = b + a;
    const double phi = te - ts;
    ClosureTerms t;
    const double dx = x_A - c * std::cos(ts);
    t.r14 = dx * dx + c * c * std::sin(ts) * std::sin(ts) - ab * ab;
    t.X = d * std::cos(ts) + i * std::cos(phi) - b * dx / ab;
    t.Y = d * std::sin(ts) - i * std::sin(phi) + b * c * std::sin(ts) / ab;
    return t;
}

std::array<double, 3> residuals_at(double a, double d, double e, double h, double i, double j,
                                   const LinkageGiven& g, double ts, double te, double tw,
                                   double x_A) {
    const ClosureTerms t = closure_terms(a, d, i, g.b, g.l_h, ts, te, x_A);
    const double phi = te - ts;
    const double psi = tw - te + ts;
    const double r15 = t.X * t.X + t.Y * t.Y - e * e;
    const double U = g.f / e * t.X - h * std::cos(psi) + (g.l_r + i) * std::cos(phi);
    const double V = g.f / e * t.Y - h * std::sin(psi) - (g.l_r + i) * std::sin(phi);
    const double r16 = U * U + V * V - j * j;
    return {t.r14, r15, r16};
}

LinkageDerived assemble(const Eigen::VectorXd& u, const LinkageGiven& g) {
    LinkageDerived out;
    out.a = u[0];
    out.d = u[1];
    out.e = u[2];
    out.h = u[3];
    out.i = u[4];
    out.j = u[5];
    out.c = g.l_h - out.d;
    out.g = g.l_r;
    return out;
}

bool physical(const LinkageDerived& l) {
    return l.a > 0 && l.c > 0 && l.d > 0 && l.e > 0 && l.g > 0 && l.h > 0 && l.i > 0 && l.j > 0;
}

// Unknowns: a, d, e, h, i, j and, when the tucked shoulder angle is not
// given, theta_st (rad) as a seventh unknown.
class SynthesisSystem {
public:
    explicit SynthesisSystem(const LinkageGiven& given) : given_(given) {
        require(given.extended.theta_s.has_value(), "extended pose requires theta_s");
        solve_tucked_shoulder_ = !given.tucked.theta_s.has_value();
    }

    int unknowns() const { return solve_tucked_shoulder_ ? 7 : 6; }

    Eigen::VectorXd residual(const Eigen::VectorXd& u) const {
        const auto& ex = given_.extended;
        const auto& tu = given_.tucked;
        const double ts_t = solve_tucked_shoulder_ ? u[6] : deg_to_rad(*tu.theta_s);
        const auto re = residuals_at(u[0], u[1], u[2], u[3], u[4], u[5], given_,
                                     deg_to_rad(*ex.theta_s), deg_to_rad(ex.theta_e),
                                     deg_to_rad(ex.theta_w), ex.x_A);
        const auto rt = residuals_at(u[0], u[1], u[2], u[3], u[4], u[5], given_, ts_t,
                                     deg_to_rad(tu.theta_e), deg_to_rad(tu.theta_w), tu.x_A);
        Eigen::VectorXd r(6);
        r << re[0], re[1], re[2], rt[0], rt[1], rt[2];
        return r;
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& u) const {
        Eigen::MatrixXd J(6, u.size());
        for (Eigen::Index k = 0; k < u.size(); ++k) {
            const double step = 1e-6 * std::max(1.0, std::abs(u[k]));
            Eigen::VectorXd up = u;
            Eigen::VectorXd um = u;
            up[k] += step;
            um[k] -= step;
            J.col(k) = (residual(up) - residual(um)) / (2.0 * step);
        }
        return J;
    }

private:
    const LinkageGiven& given_;
    bool solve_tucked_shoulder_ = false;
};

struct NewtonOutcome {
    Eigen::VectorXd u;
    double max_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

NewtonOutcome damped_newton(const SynthesisSystem& sys, Eigen::VectorXd u, int max_iterations,
                            double tolerance) {
    NewtonOutcome out;
    Eigen::VectorXd r = sys.residual(u);
    for (int it = 0; it < max_iterations; ++it) {
        out.iterations = it;
        if (!r.allFinite()) break;
        if (r.cwiseAbs().maxCoeff() < tolerance) {
            out.converged = true;
            break;
        }
        const Eigen::MatrixXd J = sys.jacobian(u);
        // Minimum-norm step so the underdetermined (7 unknown) case works too.
        const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-r);
        if (!step.allFinite()) break;

        const double norm0 = r.norm();
        double t = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
            const Eigen::VectorXd trial = u + t * step;
            const Eigen::VectorXd rt = sys.residual(trial);
            if (rt.allFinite() && rt.norm() < norm0) {
                u = trial;
                r = rt;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    out.u = u;
    out.max_residual = r.allFinite() ? r.cwiseAbs().maxCoeff() : INFINITY;
    return out;
}

// Roots of the three cascaded closure equations at one slider position.
// Each stage has two roots; nearest_root() follows one branch.
struct StageRoots {
    std::array<double, 2> root{};
    bool feasible = false;
};

StageRoots shoulder_roots(const LinkageDerived& l, const LinkageGiven& g, double x_A) {
    const double c = l.c;
    const double ab = g.b + l.a;
    StageRoots out;
    if (x_A <= 0.0) return out;
    const double cosv = (x_A * x_A + c * c - ab * ab) / (2.0 * x_A * c);
    if (std::abs(cosv) > 1.0) return out;
    const double v = std::acos(cosv);
    out.root = {v, -v};
    out.feasible = true;
    return out;
}

// phi = theta_e - theta_s, from the first four-bar loop.
StageRoots elbow_roots(const LinkageDerived& l, const LinkageGiven& g, double ts, double x_A) {
    const double ab = g.b + l.a;
    const double c = l.c;
    const double P = l.d * std::cos(ts) - g.b * (x_A - c * std::cos(ts)) / ab;
    const double Q = l.d * std::sin(ts) + g.b * c * std::sin(ts) / ab;
    const double R = std::hypot(P, Q);
    StageRoots out;
    if (R == 0.0) return out;
    const double k = (l.e * l.e - P * P - Q * Q - l.i * l.i) / (2.0 * l.i);
    const double ratio = k / R;
    if (std::abs(ratio) > 1.0) return out;
    const double beta = std::atan2(Q, P);
    const double w = std::acos(ratio);
    out.root = {-beta + w, -beta - w};
    out.feasible = true;
    return out;
}

// psi = theta_w - theta_e + theta_s, from the second four-bar loop.
StageRoots wrist_roots(const LinkageDerived& l, const LinkageGiven& g, double ts, double phi,
                       double x_A) {
    const ClosureTerms t = closure_terms(l.a, l.d, l.i, g.b, g.l_h, ts, ts + phi, x_A);
    const double U = g.f / l.e * t.X + (g.l_r + l.i) * std::cos(phi);
    const double V = g.f / l.e * t.Y - (g.l_r + l.i) * std::sin(phi);
    const double S = std::hypot(U, V);
    StageRoots out;
    if (S == 0.0) return out;
    const double m = (U * U + V * V + l.h * l.h - l.j * l.j) / (2.0 * l.h * S);
    if (std::abs(m) > 1.0) return out;
    const double gamma = std::atan2(V, U);
    const double w = std::acos(m);
    out.root = {gamma + w, gamma - w};
    out.feasible = true;
    return out;
}

// Picks the root nearest `reference` and unwraps it next to it.
double nearest_root(const StageRoots& roots, double reference) {
    const double r0 = unwrap_near(roots.root[0], reference);
    const double r1 = unwrap_near(roots.root[1], reference);
    return std::abs(r0 - reference) <= std::abs(r1 - reference) ? r0 : r1;
}

bool ambiguous(const StageRoots& roots, double reference) {
    const double r0 = unwrap_near(roots.root[0], reference);
    const double r1 = unwrap_near(roots.root[1], reference);
    return std::abs(std::abs(r0 - reference) - std::abs(r1 - reference)) < 1e-12 &&
           std::abs(r0 - r1) > 1e-12;
}

// Internal angles used for branch tracking: theta_s, phi, psi.
struct BranchPoint {
    double ts = 0.0;
    double phi = 0.0;
    double psi = 0.0;
};

std::optional<BranchPoint> track(const LinkageDerived& l, const LinkageGiven& g, double x_A,
                                 const BranchPoint& previous) {
    const StageRoots s = shoulder_roots(l, g, x_A);
    if (!s.feasible) return std::nullopt;
    BranchPoint p;
    p.ts = nearest_root(s, previous.ts);
    const StageRoots e = elbow_roots(l, g, p.ts, x_A);
    if (!e.feasible) return std::nullopt;
    p.phi = nearest_root(e, previous.phi);
    const StageRoots w = wrist_roots(l, g, p.ts, p.phi, x_A);
    if (!w.feasible) return std::nullopt;
    p.psi = nearest_root(w, previous.psi);
    return p;
}

constexpr double kTrackStep = 0.02; // mm

// Branch point at the extended pose, matched to the designer's angles.
BranchPoint anchor(const LinkageDerived& l, const LinkageGiven& g) {
    const auto& ex = g.extended;
    const double x = ex.x_A;
    const StageRoots s = shoulder_roots(l, g, x);
    if (!s.feasible) {
        throw Error(ErrorKind::OutOfRange, "extended pose is not assemblable with these lengths");
    }
    const double ts_ref = ex.theta_s ? deg_to_rad(*ex.theta_s) : kPi / 2.0;
    BranchPoint p;
    p.ts = nearest_root(s, ts_ref);
    const double phi_ref = deg_to_rad(ex.theta_e) - ts_ref;
    const StageRoots e = elbow_roots(l, g, p.ts, x);
    if (!e.feasible) {
        throw Error(ErrorKind::OutOfRange, "extended pose is not assemblable with these lengths");
    }
    if (ambiguous(e, phi_ref)) {
        throw Error(ErrorKind::BranchAmbiguity, "elbow branch at the extended pose is ambiguous");
    }
    p.phi = nearest_root(e, phi_ref);
    const double psi_ref = deg_to_rad(ex.theta_w) - deg_to_rad(ex.theta_e) + ts_ref;
    const StageRoots w = wrist_roots(l, g, p.ts, p.phi, x);
    if (!w.feasible) {
        throw Error(ErrorKind::OutOfRange, "extended pose is not assemblable with these lengths");
    }
    if (ambiguous(w, psi_ref)) {
        throw Error(ErrorKind::BranchAmbiguity, "wrist branch at the extended pose is ambiguous");
    }
    p.psi = nearest_root(w, psi_ref);
    return p;
}

// Follows the branch from the extended pose towards `target`.
// Returns the last feasible position reached and its branch point.
std::pair<double, BranchPoint> march(const LinkageDerived& l, const LinkageGiven& g,
                                     double target, bool* reached) {
    BranchPoint p = anchor(l, g);
    double x = g.extended.x_A;
    const double span = target - x;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / kTrackStep)));
    for (int k = 1; k <= steps; ++k) {
        const double xn = g.extended.x_A + span * static_cast<double>(k) / steps;
        const auto next = track(l, g, xn, p);
        if (!next) {
            *reached = false;
            return {x, p};
        }
        p = *next;
        x = xn;
    }
    *reached = true;
    return {x, p};
}

double range_edge(const LinkageDerived& l, const LinkageGiven& g, double direction) {
    // Coarse scan outward, then bisection on feasibility of the tracked branch.
    const double limit = g.extended.x_A + direction * (l.c + l.a + g.b + g.l_h + g.l_r);
    bool reached = false;
    auto [x_ok, p_ok] = march(l, g, std::max(limit, 1e-9), &reached);
    if (reached) return std::max(limit, 1e-9);
    double lo = x_ok;
    double hi = x_ok + direction * kTrackStep;
    for (int it = 0; it < 80 && std::abs(hi - lo) > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto next = track(l, g, mid, p_ok);
        if (next) {
            lo = mid;
            p_ok = *next;
        } else {
            hi = mid;
        }
    }
    return lo;
}

} // namespace

void LinkageGiven::validate() const {
    require(l_h > 0 && l_r > 0 && l_m > 0 && b > 0 && f > 0, "all given lengths must be positive");
    validate_pose(extended, "extended");
    validate_pose(tucked, "tucked");
    require(extended.x_A != tucked.x_A, "extended and tucked poses must differ in x_A");
}

std::array<double, 3> closure_residuals(const LinkageDerived& l, const LinkageGiven& g,
                                        const JointState& s) {
    return residuals_at(l.a, l.d, l.e, l.h, l.i, l.j, g, s.theta_s, s.theta_e, s.theta_w, s.x_A);
}

SynthesisResult synthesize_linkage_detailed(const LinkageGiven& given,
                                            const SynthesisOptions& options) {
    given.validate();
    const SynthesisSystem sys(given);
    const double scale = given.l_h + given.l_r;

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> length_seed(0.0, scale);
    std::uniform_real_distribution<double> angle_seed(0.0, kPi);

    double best_residual = INFINITY;
    bool any_converged = false;
    for (int start = 0; start < options.starts; ++start) {
        Eigen::VectorXd u(sys.unknowns());
        for (int k = 0; k < 6; ++k) u[k] = length_seed(rng);
        if (sys.unknowns() == 7) u[6] = angle_seed(rng);

        const NewtonOutcome out = damped_newton(sys, u, options.max_iterations, options.tolerance);
        best_residual = std::min(best_residual, out.max_residual);
        if (!out.converged) continue;
        any_converged = true;
        const LinkageDerived lengths = assemble(out.u, given);
        if (!physical(lengths)) continue;

        SynthesisResult result;
        result.lengths = lengths;
        result.tucked_theta_s =
            sys.unknowns() == 7 ? rad_to_deg(out.u[6]) : *given.tucked.theta_s;
        result.max_residual = out.max_residual;
        result.start_index = start;
        result.iterations = out.iterations;
        return result;
    }
    if (any_converged) {
        throw Error(ErrorKind::NonPhysical,
                    "every converged solution has a non-positive link length");
    }
    throw Error(ErrorKind::NoConvergence, "synthesis residual stalled at " +
                                              std::to_string(best_residual) + " mm^2");
}

LinkageDerived synthesize_linkage(const LinkageGiven& given, const SynthesisOptions& options) {
    return synthesize_linkage_detailed(given, options).lengths;
}

LoopAngles loop_angles(const LinkageDerived& l, const LinkageGiven& g, const JointState& s) {
    const double ab = g.b + l.a;
    LoopAngles out;
    auto& th = out.theta;
    th[0] = s.theta_s;
    th[3] = s.theta_e - s.theta_s;
    th[5] = s.theta_w - th[3];
    th[1] = std::atan2(l.c * std::sin(th[0]) / ab, (s.x_A - l.c * std::cos(th[0])) / ab);
    th[2] = std::atan2(g.b * std::sin(th[1]) - l.i * std::sin(th[3]) + l.d * std::sin(th[0]),
                       l.i * std::cos(th[3]) + l.d * std::cos(th[0]) - g.b * std::cos(th[1]));
    th[4] = std::atan2(-g.f * std::sin(th[2]) + l.h * std::sin(th[5]) + (l.g + l.i) * std::sin(th[3]),
                       g.f * std::cos(th[2]) - l.h * std::cos(th[5]) + (l.g + l.i) * std::cos(th[3]));
    return out;
}

std::array<double, 6> loop_closure_residuals(const LinkageDerived& l, const LinkageGiven& g,
                                             const JointState& s) {
    const auto th = loop_angles(l, g, s).theta;
    const double ab = g.b + l.a;
    const double lh_d = g.l_h - l.d;
    const double ri = g.l_r + l.i;
    const double ts = s.theta_s;
    const double phi = s.theta_e - s.theta_s;
    const double psi = s.theta_w - s.theta_e + s.theta_s;
    return {
        lh_d * std::cos(ts) + ab * std::cos(th[1]) - s.x_A,
        lh_d * std::sin(ts) - ab * std::sin(th[1]),
        g.b * std::cos(th[1]) + l.e * std::cos(th[2]) - l.i * std::cos(phi) - l.d * std::cos(ts),
        -g.b * std::sin(th[1]) + l.e * std::sin(th[2]) + l.i * std::sin(phi) - l.d * std::sin(ts),
        g.f * std::cos(th[2]) - l.j * std::cos(th[4]) - l.h * std::cos(psi) + ri * std::cos(phi),
        g.f * std::sin(th[2]) + l.j * std::sin(th[4]) - l.h * std::sin(psi) - ri * std::sin(phi),
    };
}

SliderRange reachable_range(const LinkageDerived& lengths, const LinkageGiven& given) {
    return {range_edge(lengths, given, -1.0), range_edge(lengths, given, +1.0)};
}

JointState forward_kinematics(const LinkageDerived& lengths, const LinkageGiven& given,
                              double x_A) {
    if (!(x_A > 0.0) || !std::isfinite(x_A)) {
        throw Error(ErrorKind::OutOfRange, "x_A must be positive and finite");
    }
    bool reached = false;
    const BranchPoint p = march(lengths, given, x_A, &reached).second;
    if (!reached) {
        throw Error(ErrorKind::OutOfRange, "x_A = " + std::to_string(x_A) +
                                               " mm is outside the reachable slider range");
    }
    JointState s;
    s.x_A = x_A;
    s.theta_s = p.ts;
    s.theta_e = p.ts + p.phi;
    s.theta_w = p.psi + p.phi;
    return s;
}

SkeletonPose skeleton_pose(const JointState& state, double flap_angle, double wrist_mount,
                           const LinkageGiven& given, Side side) {
    using Eigen::AngleAxisd;
    using Eigen::Vector3d;

    // Wing frame: u posterior, v outboard, w up (right-handed). Planar joint
    // angles are measured from the posterior axis towards outboard.
    const Vector3d u = Vector3d::UnitX();
    const Vector3d w = Vector3d::UnitZ();
    auto planar = [](double angle) { return Vector3d(std::cos(angle), std::sin(angle), 0.0); };

    const double humerus_dir = state.theta_s;
    const double radius_dir = kPi - (state.theta_e - state.theta_s);
    const double hand_extended_dir = radius_dir + kPi + deg_to_rad(given.extended.theta_w);
    const double fold = deg_to_rad(given.extended.theta_w) - state.theta_w;

    const Vector3d radial = planar(radius_dir);
    const Vector3d wrist_axis = AngleAxisd(wrist_mount, radial) * w;
    const AngleAxisd fold_rotation(-fold, wrist_axis);
    const Vector3d hand = fold_rotation * planar(hand_extended_dir);
    const Vector3d hand_normal = fold_rotation * w;

    Vector3d normal_ref = w - w.dot(hand) * hand;
    double pitch = 0.0;
    if (normal_ref.norm() > 1e-12) {
        normal_ref.normalize();
        pitch = std::atan2(hand.dot(normal_ref.cross(hand_normal)), normal_ref.dot(hand_normal));
    }

    const Vector3d shoulder = Vector3d::Zero();
    const Vector3d elbow = shoulder + given.l_h * planar(humerus_dir);
    const Vector3d wrist = elbow + given.l_r * radial;
    const Vector3d tip = wrist + given.l_m * hand;

    const AngleAxisd flap(flap_angle, u);
    // Wing frame -> body frame (x forward, y left, z up).
    const double outboard_sign = side == Side::Left ? 1.0 : -1.0;
    auto to_body = [&](const Vector3d& p) {
        const Vector3d q = flap * p;
        return Vector3d(-q.x(), outboard_sign * q.y(), q.z());
    };

    SkeletonPose pose;
    pose.shoulder = to_body(shoulder);
    pose.elbow = to_body(elbow);
    pose.wrist = to_body(wrist);
    pose.wingtip = to_body(tip);
    pose.hand_wing_pitch = pitch;
    return pose;
}

double wingspan(const LinkageDerived& lengths, const LinkageGiven& given, double x_A,
                double wrist_mount) {
    const JointState s = forward_kinematics(lengths, given, x_A);
    return std::abs(skeleton_pose(s, 0.0, wrist_mount, given).wingtip.y());
}

} // namespace morphwing
