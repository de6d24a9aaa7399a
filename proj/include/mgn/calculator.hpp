#pragma once

#include "mgn/divisor.hpp"
#include "mgn/hodge.hpp"
#include "mgn/kappa_psi.hpp"
#include "mgn/tau.hpp"
#include "mgn/taut_ag.hpp"

namespace mgn {

// One bundle of engines sharing their memo tables.
struct Calculator {
    TauEngine tau;
    KappaPsiEngine kappa_psi{tau};
    HodgeEngine hodge{kappa_psi};
    DivisorEngine divisor{kappa_psi, hodge};
};

}  // namespace mgn
