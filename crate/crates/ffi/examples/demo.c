/* Mines a graph, builds rules and prints the score of one link.
 * usage: demo EDGES SRC DST LAYER SUPPORT (0 for the default) */
#include <stdio.h>
#include <stdlib.h>

#include "mrk.h"

static int fail(const char *what, MrkStatus st) {
    const char *msg = mrk_last_error();
    fprintf(stderr, "%s failed (%d): %s\n", what, (int)st, msg ? msg : "");
    return 1;
}

int main(int argc, char **argv) {
    if (argc != 6) {
        fprintf(stderr, "usage: %s EDGES SRC DST LAYER SUPPORT\n", argv[0]);
        return 2;
    }
    MrkGraph *g = NULL;
    MrkPatternSet *p = NULL;
    MrkRuleSet *r = NULL;
    MrkScoreTable *t = NULL;
    double score = 0.0;
    MrkStatus st;

    if ((st = mrk_graph_load(argv[1], NULL, false, &g)) != MRK_STATUS_OK) return fail("load", st);
    if ((st = mrk_mine(g, (size_t)strtoul(argv[5], NULL, 10), 4, &p)) != MRK_STATUS_OK) return fail("mine", st);
    if ((st = mrk_rules_build(p, g, &r)) != MRK_STATUS_OK) return fail("rules", st);
    if ((st = mrk_predict(g, r, "conf", &t)) != MRK_STATUS_OK) return fail("predict", st);
    if ((st = mrk_score_table_get(t, argv[2], argv[3], argv[4], &score)) != MRK_STATUS_OK)
        return fail("lookup", st);

    printf("patterns %zu rules %zu scored %zu score %.6f\n", mrk_pattern_set_len(p), mrk_rule_set_len(r),
           mrk_score_table_len(t), score);
    mrk_score_table_free(t);
    mrk_rule_set_free(r);
    mrk_pattern_set_free(p);
    mrk_graph_free(g);
    return 0;
}
