use crate::algo::StackAlgorithm;
use crate::error::Result;
use crate::stack::{Data, StackView};

/// One input line of the test-run problem: `value,pops`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestRunItem {
    pub value: i64,
    pub pops: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TestRunContext {
    /// Pops still owed by the current element.
    pub remaining_pops: u64,
}

/// Synthetic stack algorithm driven entirely by its input: element
/// `value,pops` pops `pops` entries (fewer if the stack runs out) and is
/// then pushed.
#[derive(Debug, Clone, Copy, Default)]
pub struct TestRun;

impl StackAlgorithm for TestRun {
    type Payload = TestRunItem;
    type Context = TestRunContext;

    fn access_depth(&self) -> usize {
        1
    }

    fn initial_context(&self) -> TestRunContext {
        TestRunContext::default()
    }

    fn read_input(
        &self,
        line: &str,
        ctx: &mut TestRunContext,
    ) -> std::result::Result<TestRunItem, String> {
        let (v, p) = line
            .split_once(',')
            .ok_or_else(|| format!("expected `value,pops`, got `{line}`"))?;
        let value = v
            .trim()
            .parse()
            .map_err(|_| format!("bad value `{}`", v.trim()))?;
        let pops = p
            .trim()
            .parse()
            .map_err(|_| format!("bad pop count `{}`", p.trim()))?;
        ctx.remaining_pops = pops;
        Ok(TestRunItem { value, pops })
    }

    fn pop_condition(
        &self,
        _: &TestRunItem,
        ctx: &TestRunContext,
        _: &mut StackView<'_, TestRunItem, TestRunContext>,
    ) -> Result<bool> {
        Ok(ctx.remaining_pops > 0)
    }

    fn post_pop(
        &self,
        _: &TestRunItem,
        _: &Data<TestRunItem, TestRunContext>,
        ctx: &mut TestRunContext,
    ) {
        ctx.remaining_pops -= 1;
    }

    fn pre_push(&self, _: &TestRunItem, ctx: &mut TestRunContext) {
        ctx.remaining_pops = 0;
    }

    fn format_record(&self, d: &Data<TestRunItem, TestRunContext>) -> String {
        d.payload().value.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::{MemorySource, Runner};
    use std::sync::Arc;

    fn run(text: &str) -> Vec<String> {
        let mut r = Runner::classic(
            Arc::new(TestRun),
            Arc::new(MemorySource::new(text.to_string())),
        );
        let mut out = Vec::new();
        r.run(&mut out).unwrap();
        String::from_utf8(out)
            .unwrap()
            .lines()
            .map(String::from)
            .collect()
    }

    #[test]
    fn pops_then_pushes() {
        assert_eq!(run("5,0\n7,0\n3,1\n9,2\n"), ["9"]);
        assert_eq!(run("5,0\n7,0\n3,1\n"), ["3", "5"]);
    }

    #[test]
    fn excess_pops_stop_at_empty() {
        assert_eq!(run("1,0\n2,5\n"), ["2"]);
    }

    #[test]
    fn malformed_line_reports_location() {
        let mut r = Runner::classic(
            Arc::new(TestRun),
            Arc::new(MemorySource::new("# c\n1,0\n2;0\n".to_string())),
        );
        let err = r.run(&mut std::io::sink()).unwrap_err();
        assert_eq!(
            err,
            crate::Error::Parse {
                location: "line 3".into(),
                message: "expected `value,pops`, got `2;0`".into()
            }
        );
    }
}
