use proptest::prelude::*;

use lio::lattice::Secrecy;
use lio::{Label, PrincipalLabel};

fn principal() -> impl Strategy<Value = Label> {
    let names = prop::collection::btree_set("[A-D]", 0..4);
    (names.clone(), names, any::<bool>()).prop_map(|(s, i, all)| {
        let mut p = PrincipalLabel::new(s, i);
        if all {
            p.secrecy = Secrecy::All;
        }
        Label::Principal(p)
    })
}

proptest! {
    #[test]
    fn display_parses_back(l in principal()) {
        prop_assert_eq!(l.to_string().parse::<Label>().unwrap(), l);
    }

    #[test]
    fn join_and_meet_commute(a in principal(), b in principal()) {
        prop_assert_eq!(a.join(&b).unwrap(), b.join(&a).unwrap());
        prop_assert_eq!(a.meet(&b).unwrap(), b.meet(&a).unwrap());
    }

    #[test]
    fn two_point_never_mixes(l in principal()) {
        prop_assert!(l.can_flow_to(&Label::HIGH).is_err());
    }
}
