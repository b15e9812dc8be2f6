//! What each catalog row prescribes for its fixture: the mapping sources
//! and the ontology axioms, written with this crate's vocabulary naming.

use vkg_patterns::model::{OntologyAxiom, PatternKind};

pub struct Expected {
    pub sources: Vec<&'static str>,
    pub axioms: Vec<OntologyAxiom>,
}

fn sub(a: &str, b: &str) -> OntologyAxiom {
    OntologyAxiom::SubClass(a.into(), b.into())
}
fn dom(a: &str, b: &str) -> OntologyAxiom {
    OntologyAxiom::Domain(a.into(), b.into())
}
fn rng(a: &str, b: &str) -> OntologyAxiom {
    OntologyAxiom::Range(a.into(), b.into())
}
fn dd(a: &str, b: &str) -> OntologyAxiom {
    OntologyAxiom::DataDomain(a.into(), b.into())
}
fn subp(a: &str, b: &str) -> OntologyAxiom {
    OntologyAxiom::SubObjectProperty(a.into(), b.into())
}

pub fn expected(kind: PatternKind) -> Expected {
    use PatternKind::*;
    let (sources, axioms) = match kind {
        // s: T_E; {∃d_A ⊑ C_E} for A in K ∪ A
        SE | DE => (
            vec!["SELECT ssn, name FROM person"],
            vec![dd(":ssn", ":Person"), dd(":name", ":Person")],
        ),
        // s: T_R; ∃p_R ⊑ C_E, ∃p_R⁻ ⊑ C_F
        SR | DR => (
            vec!["SELECT ssn, cid FROM attends"],
            vec![dom(":attends", ":Person"), rng(":attends", ":Course")],
        ),
        // s: T_R ⋈_{U_RF = U_F} T_F
        SRa | DRa => (
            vec!["SELECT enrol.ssn, course.cid FROM enrol JOIN course ON enrol.code = course.code"],
            vec![dom(":enrol", ":Person"), rng(":enrol", ":Course")],
        ),
        // s: T_E; ∃p_EF ⊑ C_E, ∃p_EF⁻ ⊑ C_F
        SRm | DRm => (
            vec!["SELECT eid, dept FROM employee"],
            vec![dom(":dept_ref", ":Employee"), rng(":dept_ref", ":Department")],
        ),
        // s: T_R; one property per role, data properties on K_R ∪ A_R
        SRR | DRR => (
            vec!["SELECT ssn, cid, grade FROM exam"],
            vec![
                dom(":exam_ssn", ":Exam"),
                rng(":exam_ssn", ":Person"),
                dom(":exam_cid", ":Exam"),
                rng(":exam_cid", ":Course"),
                dd(":ssn", ":Exam"),
                dd(":cid", ":Exam"),
                dd(":grade", ":Exam"),
            ],
        ),
        // s: T_F; C_F ⊑ C_E, data properties on A_F
        SH | DH => (
            vec!["SELECT ssn, matr FROM student"],
            vec![sub(":Student", ":Person"), dd(":matr", ":Student")],
        ),
        // s: T_F; data properties on K_F ∪ A_F
        SHa | DHa => (
            vec!["SELECT ssn, sid, matr FROM student"],
            vec![sub(":Student", ":Person"), dd(":sid", ":Student"), dd(":matr", ":Student")],
        ),
        // s: π_{c, K_F}(T_F) with the remaining attributes
        SHaa | DHaa => (
            vec!["SELECT 'GraduateStudent' AS role, id, thesis FROM grads"],
            vec![sub(":Grads", ":People"), dd(":thesis", ":Grads")],
        ),
        // s: T_E; C_F from K_F with data on K_F ∪ A_F, p_R from E to F
        DR1Nm => (
            vec!["SELECT id, course_id, course_name FROM students"],
            vec![
                dd(":course_id", ":Course"),
                dd(":course_name", ":Course"),
                dom(":course_id_ref", ":Students"),
                rng(":course_id_ref", ":Course"),
            ],
        ),
        DR11m => (
            vec!["SELECT uid, rector_ssn, rector_name FROM university"],
            vec![
                dd(":rector_ssn", ":Rector"),
                dd(":rector_name", ":Rector"),
                dom(":rector_ssn_ref", ":University"),
                rng(":rector_ssn_ref", ":Rector"),
            ],
        ),
        // s1: T_R; s2: T_R ⋈_{K_RE = K_E} T_E
        DH01 => (
            vec![
                "SELECT ssn, cid FROM attends",
                "SELECT attends.ssn, person.name FROM attends JOIN person ON attends.ssn = person.ssn",
            ],
            vec![
                sub(":Person_Attends", ":Person"),
                dom(":attends", ":Person_Attends"),
                rng(":attends", ":Course"),
            ],
        ),
        // one σ_{B = v}(T_E) per value
        CE2C => (
            vec![
                "SELECT id FROM people WHERE gender = 'F'",
                "SELECT id FROM people WHERE gender = 'M'",
            ],
            vec![sub(":People_F", ":People"), sub(":People_M", ":People")],
        ),
        CE2D => (
            vec![
                "SELECT id FROM people WHERE gender = 'F'",
                "SELECT id FROM people WHERE gender = 'M'",
            ],
            vec![dd(":hasGender", ":People")],
        ),
        CE2O => (
            vec![
                "SELECT id, gender FROM people WHERE gender = 'F'",
                "SELECT id, gender FROM people WHERE gender = 'M'",
            ],
            vec![dom(":gender", ":People")],
        ),
        // one σ_{B = v}(T_R) per value, p_R^v ⊑ p_R
        CR2O => (
            vec![
                "SELECT pid, rank, cid FROM teaches WHERE rank = 'full'",
                "SELECT pid, rank, cid FROM teaches WHERE rank = 'associate'",
            ],
            vec![subp(":teaches_full", ":teaches"), subp(":teaches_associate", ":teaches")],
        ),
    };
    Expected { sources, axioms }
}
