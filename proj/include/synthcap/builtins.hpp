#pragma once

#include <string>
#include <utility>

#include "synthcap/prob.hpp"

namespace synthcap {

// The worked example channels, each paired with its standard input
// distribution:
//   erasure p          binary uniform input, output {0,e,1}
//   reverse-erasure p  ternary input {0,e,1} with erasure mass p, binary output
//   scatter m          uniform input on [m], uniform output over the other symbols
//   bsc p              binary uniform input, crossover probability p
//   identity k         uniform input on k symbols, noiseless channel
std::pair<Pmf, Channel> builtin_channel(const std::string& name, double param);

Channel erasure_channel(double p);
Channel reverse_erasure_channel();
Pmf reverse_erasure_input(double p);
Channel scatter_channel(int m);
Channel bsc_channel(double p);

}  // namespace synthcap
