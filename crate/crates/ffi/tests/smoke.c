#include <stdio.h>

#include "psl.h"

int main(void) {
    PslFormula *f = NULL;
    PslStatus s = psl_formula_parse("p cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n", &f);
    if (s != PSL_STATUS_OK) {
        fprintf(stderr, "%s\n", psl_last_error());
        return 1;
    }
    char *z = NULL;
    if (psl_count_models(f, 32, &z) == PSL_STATUS_OK) {
        printf("Z=%s\n", z);
        psl_string_free(z);
    }
    PslTestResult r;
    psl_detect(f, PSL_TEST_COUPLING, 0, &r);
    printf("decision=%d T=%llu\n", r.decision, (unsigned long long)r.t);
    psl_formula_free(f);
    return 0;
}
