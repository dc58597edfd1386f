#include <cstdio>
int main() { std::puts("qcmc placeholder"); return 0; }
