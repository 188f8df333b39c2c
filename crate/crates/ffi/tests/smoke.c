#include <stdio.h>
#include <string.h>
#include "critgraph.h"

int main(void) {
    CgGraph *g = NULL;
    if (cg_graph_er(1000, 1.0, 7, &g) != CG_STATUS_OK) return 1;
    if (cg_graph_n(g) != 1000) return 2;
    CgSusceptibility s;
    if (cg_graph_susceptibility(g, &s) != CG_STATUS_OK || s.s1 != 1.0) return 3;
    size_t count = 0;
    if (cg_graph_component_sizes(g, NULL, 0, &count) != CG_STATUS_BUFFER_TOO_SMALL || count == 0) return 4;
    cg_graph_free(g);

    double dist[4] = {0.0, 1.0, 1.0, 0.0};
    double mass[2] = {0.5, 0.5};
    double one[1] = {0.0};
    double m1[1] = {1.0};
    CgSpace *a = NULL, *b = NULL;
    if (cg_space_new(2, dist, mass, &a) != CG_STATUS_OK) return 5;
    if (cg_space_new(1, one, m1, &b) != CG_STATUS_OK) return 6;
    double d = -1.0;
    if (cg_ghp_exact(a, b, &d) != CG_STATUS_OK || d != 0.5) return 7;
    cg_space_free(a);
    cg_space_free(b);

    double bad[2] = {0.5, 0.6};
    if (cg_cm_params(bad, 2, NULL) != CG_STATUS_NULL_POINTER) return 8;
    CgCmParams p;
    if (cg_cm_params(bad, 2, &p) != CG_STATUS_INVALID_INPUT) return 9;
    if (cg_last_error() == NULL || strlen(cg_last_error()) == 0) return 10;
    printf("ok %s\n", cg_version());
    return 0;
}
