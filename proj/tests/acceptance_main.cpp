// Acceptance suite: one numbered check per criterion, each printing a single
// PASS/FAIL line. Run all with no arguments or one with --criterion N.

#include <cstring>
#include <iostream>

int run_criterion(int n);

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            only = std::atoi(argv[i + 1]);
    int failures = 0;
    for (int n = 1; n <= 12; ++n) {
        if (only != 0 && n != only) continue;
        failures += run_criterion(n);
    }
    return failures == 0 ? 0 : 1;
}
