#include "odeconn/frobenius.hpp"
#include <iostream>
using namespace odeconn;
int main() {
    std::string fd = ODECONN_FIXTURE_DIR;
    auto N1 = read_operator_file(fd + "/N1.op");
    auto Z2 = read_operator_file(fd + "/Z2.op");
    auto Y3 = read_operator_file(fd + "/Y3.op");
    auto L1 = read_operator_file(fd + "/L1.op");
    auto Z2N1 = op_mul(Z2, N1);
    auto L6 = op_mul(Y3, Z2N1);
    auto vf = verify_factor(L6, Z2N1);
    std::cout << "L6/Z2N1: divides=" << vf.divides << " quotient==Y3: " << (vf.quotient == Y3) << "\n";
    auto vf2 = verify_factor(Z2N1, N1);
    std::cout << "Z2N1/N1: divides=" << vf2.divides << " quotient==Z2: " << (vf2.quotient == Z2) << "\n";
    std::cout << "L6/L1: divides=" << verify_factor(L6, L1).divides << "\n";
    // associativity: (Y3*Z2)*N1 == Y3*(Z2*N1)
    auto lhs = op_mul(op_mul(Y3, Z2), N1);
    std::cout << "assoc: " << (lhs == L6) << "\n";
    return 0;
}
