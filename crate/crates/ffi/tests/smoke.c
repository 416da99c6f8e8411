#include <stdio.h>
#include <string.h>
#include "graded_tannaka.h"

int main(void) {
    TkWorkspace *ws = NULL;
    if (tk_workspace_open("genus-1", &ws) != TK_STATUS_OK) {
        fprintf(stderr, "open: %s\n", tk_last_error());
        return 10;
    }
    const char *argv[] = {"genus-1"};
    TkReport *r = NULL;
    if (tk_run(ws, "split", argv, 1, 2, TK_METHOD_LEFSCHETZ, &r) != TK_STATUS_OK) {
        fprintf(stderr, "split: %s\n", tk_last_error());
        return 11;
    }
    int code = tk_report_exit_code(r);
    if (strstr(tk_report_machine(r), "\"determinism_hash\"") == NULL) {
        return 12;
    }
    TkReport *back = NULL;
    if (tk_replay(ws, tk_report_machine(r), &back) != TK_STATUS_OK || !tk_report_passed(back)) {
        return 13;
    }
    TkWorkspace *bad = NULL;
    if (tk_workspace_parse("{\"format_version\": 1,", &bad) != TK_STATUS_PARSE || tk_last_error() == NULL) {
        return 14;
    }
    printf("%s", tk_report_human(r));
    tk_report_free(back);
    tk_report_free(r);
    tk_workspace_free(ws);
    return code;
}
