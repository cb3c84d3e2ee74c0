#pragma once

#include "geomrl/errors.hpp"
#include "geomrl/manifold/composite.hpp"

namespace geomrl {

/// Single-step tasks keep the local base on the parameterization base;
/// trajectory tasks move it to each reached state.
enum class FrameMode { kSingleStep, kTrajectory };

/// Parameterization base P (fixed) and local base L (moving).
class TangentFrame {
 public:
  TangentFrame(CompositePoint base_p, CompositePoint base_l, FrameMode mode)
      : base_p_(std::move(base_p)), base_l_(std::move(base_l)), mode_(mode) {
    if (base_p_.layout() != base_l_.layout()) {
      throw KindMismatch("TangentFrame: base_P and base_L factor kinds differ");
    }
    if (mode_ == FrameMode::kSingleStep) base_l_ = base_p_;
  }

  const CompositePoint& base_p() const { return base_p_; }
  const CompositePoint& base_l() const { return base_l_; }
  FrameMode mode() const { return mode_; }

 private:
  friend TangentFrame frame_update(const TangentFrame&, const CompositePoint&);

  CompositePoint base_p_;
  CompositePoint base_l_;
  FrameMode mode_;
};

/// Moves the local base to `new_state` (trajectory mode only). base_P is
/// never touched.
inline TangentFrame frame_update(const TangentFrame& frame, const CompositePoint& new_state) {
  if (new_state.layout() != frame.base_p_.layout()) {
    throw KindMismatch("frame_update: state factor kinds differ from the frame");
  }
  TangentFrame next = frame;
  if (frame.mode_ == FrameMode::kTrajectory) next.base_l_ = new_state;
  return next;
}

}  // namespace geomrl
