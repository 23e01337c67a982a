#pragma once

#include <stdexcept>

namespace nldp::detail {

struct GaussRule {
  const double* x;
  const double* w;
  int n;
};

// Gauss-Legendre rules on [-1, 1].
inline GaussRule gauss_rule(int n) {
  static const double x2[] = {-0.57735026918962576, 0.57735026918962576};
  static const double w2[] = {1.0, 1.0};
  static const double x3[] = {-0.77459666924148338, 0.0, 0.77459666924148338};
  static const double w3[] = {0.55555555555555556, 0.88888888888888889, 0.55555555555555556};
  static const double x4[] = {-0.86113631159405258, -0.33998104358485626, 0.33998104358485626,
                              0.86113631159405258};
  static const double w4[] = {0.34785484513745386, 0.65214515486254614, 0.65214515486254614,
                              0.34785484513745386};
  static const double x5[] = {-0.90617984593866399, -0.53846931010568309, 0.0,
                              0.53846931010568309, 0.90617984593866399};
  static const double w5[] = {0.23692688505618909, 0.47862867049936647, 0.56888888888888889,
                              0.47862867049936647, 0.23692688505618909};
  static const double x6[] = {-0.93246951420315203, -0.66120938646626451, -0.23861918608319691,
                              0.23861918608319691, 0.66120938646626451, 0.93246951420315203};
  static const double w6[] = {0.17132449237917035, 0.36076157304813860, 0.46791393457269105,
                              0.46791393457269105, 0.36076157304813860, 0.17132449237917035};
  static const double x8[] = {-0.96028985649753623, -0.79666647741362674, -0.52553240991632899,
                              -0.18343464249564980, 0.18343464249564980, 0.52553240991632899,
                              0.79666647741362674,  0.96028985649753623};
  static const double w8[] = {0.10122853629037626, 0.22238103445337447, 0.31370664587788729,
                              0.36268378337836198, 0.36268378337836198, 0.31370664587788729,
                              0.22238103445337447, 0.10122853629037626};
  switch (n) {
    case 2: return {x2, w2, 2};
    case 3: return {x3, w3, 3};
    case 4: return {x4, w4, 4};
    case 5: return {x5, w5, 5};
    case 6: return {x6, w6, 6};
    case 8: return {x8, w8, 8};
    default: throw std::invalid_argument("gauss_rule: supported orders are 2,3,4,5,6,8");
  }
}

}  // namespace nldp::detail
