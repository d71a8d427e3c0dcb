#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include <Eigen/Core>

namespace morphwing {

// Joint angles and slider displacement imposed at one design pose.
// Angles are in degrees, x_A in mm, matching how designs are written down.
struct PoseConstraint {
    std::optional<double> theta_s; // shoulder
    double theta_e = 0.0;          // elbow
    double theta_w = 0.0;          // wrist
    double x_A = 0.0;              // output-slider displacement
};

// Lengths fixed by the designer (mm) plus the extended and tucked poses.
struct LinkageGiven {
    double l_h = 0.0; // humerus
    double l_r = 0.0; // radius
    double l_m = 0.0; // manus (hand wing)
    double b = 0.0;
    double f = 0.0;
    PoseConstraint extended;
    PoseConstraint tucked;

    // Throws Error(InvalidInput) when a length or angle is out of range.
    void validate() const;
};

// Link lengths produced by synthesis (mm). c + d = l_h and g = l_r.
struct LinkageDerived {
    double a = 0.0;
    double c = 0.0;
    double d = 0.0;
    double e = 0.0;
    double g = 0.0;
    double h = 0.0;
    double i = 0.0;
    double j = 0.0;
};

// Instantaneous mechanism state; angles in radians, x_A in mm.
struct JointState {
    double theta_s = 0.0;
    double theta_e = 0.0;
    double theta_w = 0.0;
    double x_A = 0.0;
};

// Internal loop angles theta_1..theta_6 (radians), index 0 is theta_1.
struct LoopAngles {
    std::array<double, 6> theta{};
};

struct SkeletonPose {
    Eigen::Vector3d shoulder = Eigen::Vector3d::Zero();
    Eigen::Vector3d elbow = Eigen::Vector3d::Zero();
    Eigen::Vector3d wrist = Eigen::Vector3d::Zero();
    Eigen::Vector3d wingtip = Eigen::Vector3d::Zero();
    double hand_wing_pitch = 0.0; // rad
};

enum class Side { Left, Right };

struct SynthesisOptions {
    std::uint64_t seed = 0x5EEDF00Dull;
    int starts = 16;
    int max_iterations = 200;
    double tolerance = 1e-9; // max |residual| in mm^2
};

struct SynthesisResult {
    LinkageDerived lengths;
    double tucked_theta_s = 0.0; // deg; solved when the tucked pose omits it
    double max_residual = 0.0;   // mm^2 over both poses
    int start_index = 0;         // which multi-start seed converged
    int iterations = 0;
};

// Residuals of the three eliminated closure equations (slider-crank,
// first four-bar, second four-bar) in mm^2. Zero when the pose is
// assemblable with the given lengths.
std::array<double, 3> closure_residuals(const LinkageDerived& lengths, const LinkageGiven& given,
                                        const JointState& state);

// Solves the two-pose synthesis problem for a, d, e, h, i, j.
// Throws NoConvergence or NonPhysical.
SynthesisResult synthesize_linkage_detailed(const LinkageGiven& given,
                                            const SynthesisOptions& options = {});
LinkageDerived synthesize_linkage(const LinkageGiven& given, const SynthesisOptions& options = {});

// Recovers theta_1..theta_6 from a joint state.
LoopAngles loop_angles(const LinkageDerived& lengths, const LinkageGiven& given,
                       const JointState& state);

// The six scalar loop-closure residuals (mm) of the slider-crank and the two
// four-bar loops, evaluated with loop_angles().
std::array<double, 6> loop_closure_residuals(const LinkageDerived& lengths,
                                             const LinkageGiven& given, const JointState& state);

struct SliderRange {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

// Interval of x_A reachable on the assembly branch that passes through the
// extended pose.
SliderRange reachable_range(const LinkageDerived& lengths, const LinkageGiven& given);

// Joint angles for a slider displacement, on the branch continuous with the
// extended pose. Throws OutOfRange or BranchAmbiguity.
JointState forward_kinematics(const LinkageDerived& lengths, const LinkageGiven& given,
                              double x_A);

// Places the planar skeleton in the body frame (x forward, y left, z up,
// shoulder at the origin), flapped about the body x axis by flap_angle.
// wrist_mount tilts the wrist hinge about the radial spar away from the
// wing-plane normal.
SkeletonPose skeleton_pose(const JointState& state, double flap_angle, double wrist_mount,
                           const LinkageGiven& given, Side side = Side::Right);

// Wingtip lateral distance from the body axis at zero flap.
double wingspan(const LinkageDerived& lengths, const LinkageGiven& given, double x_A,
                double wrist_mount = 0.0);

} // namespace morphwing
