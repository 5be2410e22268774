#include <cstdio>
int main() { std::puts("rcqed placeholder"); return 0; }
