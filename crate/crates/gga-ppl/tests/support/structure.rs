pub fn assert_same_structure(a: &gga_ppl::ProgramGraph, b: &gga_ppl::ProgramGraph, ctx: &str) {
    assert_eq!(a.len(), b.len(), "{ctx}");
    for (x, y) in a.nodes.iter().zip(&b.nodes) {
        assert_eq!((&x.kind, x.observed, x.queried, x.template_of), (&y.kind, y.observed, y.queried, y.template_of), "{ctx}");
    }
}
