//! Structured text reports: stable keys, one record per blank-line
//! separated block, byte-deterministic for identical inputs.

/// A report is an ordered list of blocks; each block is an ordered list of
/// `key: value` lines.
#[derive(Default)]
pub struct Report {
    blocks: Vec<Vec<(String, String)>>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Report { blocks: Vec::new() };
        r.begin_block();
        r.push("report", command);
        r.push("tool", concat!("modpm ", env!("CARGO_PKG_VERSION")));
        r
    }

    pub fn begin_block(&mut self) {
        self.blocks.push(Vec::new());
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.blocks
            .last_mut()
            .expect("begin_block first")
            .push((key.to_string(), value.to_string()));
    }

    pub fn push_warning(&mut self, value: impl std::fmt::Display) {
        self.push("warning", value);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            for (k, v) in block {
                out.push_str(k);
                out.push_str(": ");
                out.push_str(v);
                out.push('\n');
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_blocks_deterministically() {
        let mut r = Report::new("demo");
        r.push("input", "x");
        r.begin_block();
        r.push("system", 1);
        r.push("value", "a");
        let s = r.render();
        assert_eq!(
            s,
            format!(
                "report: demo\ntool: modpm {}\ninput: x\n\nsystem: 1\nvalue: a\n",
                env!("CARGO_PKG_VERSION")
            )
        );
        let s2 = r.render();
        assert_eq!(s, s2);
    }
}
