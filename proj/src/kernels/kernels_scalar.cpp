#include "freemax/kernels/kernels.hpp"

#include "kernel_impl.hpp"

namespace freemax::kern::detail {

namespace {
using B = impl::Body<vm::ScalarLane>;
}

const Ops& scalar_ops() {
  static const Ops table = {
      B::product,       B::free_conv, B::free_power, B::lambda_vee,
      B::pow_int,       B::root,      B::log_map,    B::exp_map,
      impl::max_abs_diff_scalar,      impl::fill_uniform_scalar,
      B::neg_log_scaled, B::q_uniform, B::q_gumbel,  B::q_frechet,
      B::q_weibull,
  };
  return table;
}

}  // namespace freemax::kern::detail
