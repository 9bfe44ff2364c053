import dataclasses

import pytest

from medsite.utils.domain import (DEFAULT_CAPACITY_KG, CollectionSite, Instance, ModelParams, OrgType,
                                  default_params, estimate_daily_waste, require_valid, validate_instance)
from medsite.utils.errors import InvalidInputError
from medsite.utils.geo import GeoPoint
from medsite.utils.violation_list import ViolationCode

from tests.helpers import common_site, instance, large_site


def test_default_params():
    p = default_params()
    assert p.f_cny == 3000
    assert p.b_cny_kg == 3
    assert p.t_cny_kg_km == 2
    assert p.a1_cny_kg == 1
    assert p.a2_cny_kg_km == 0.5
    assert p.L_m == 500
    assert p.b_cny_kg > p.a1_cny_kg
    assert p.t_cny_kg_km > p.a2_cny_kg_km
    assert p.check() is p
    assert DEFAULT_CAPACITY_KG == 1500


@pytest.mark.parametrize('change', [
    {'a1_cny_kg': 3.0},
    {'a2_cny_kg_km': 2.5},
    {'L_m': 0.0},
    {'f_cny': -1.0},
    {'t_cny_kg_km': float('nan')},
])
def test_params_check_rejects(change):
    with pytest.raises(InvalidInputError):
        dataclasses.replace(ModelParams(), **change).check()


@pytest.mark.parametrize('org_type, beds, expected', [
    (OrgType.PrimaryHospitalOrAbove, 500, 200.0),
    (OrgType.Clinic, None, 1.5),
    (OrgType.CommunityHospital, None, 17.5),
    (OrgType.Outpatient, None, 17.5),
])
def test_estimate_daily_waste(org_type, beds, expected):
    assert estimate_daily_waste(org_type, beds) == pytest.approx(expected)


def test_estimate_daily_waste_needs_beds():
    with pytest.raises(InvalidInputError):
        estimate_daily_waste(OrgType.PrimaryHospitalOrAbove)
    with pytest.raises(InvalidInputError):
        estimate_daily_waste(OrgType.PrimaryHospitalOrAbove, 0)


def test_estimate_daily_waste_monotone_in_beds():
    values = [estimate_daily_waste(OrgType.PrimaryHospitalOrAbove, beds) for beds in range(1, 1200, 37)]
    assert values == sorted(values)


@pytest.mark.parametrize('text, expected', [
    ('Clinic', OrgType.Clinic),
    ('primary_hospital_or_above', OrgType.PrimaryHospitalOrAbove),
    (' community hospital ', OrgType.CommunityHospital),
])
def test_org_type_parse(text, expected):
    assert OrgType.parse(text) is expected


def test_org_type_parse_unknown():
    with pytest.raises(InvalidInputError):
        OrgType.parse('pharmacy')


def test_only_primary_hospitals_are_large():
    assert [t for t in OrgType if t.is_large] == [OrgType.PrimaryHospitalOrAbove]


def test_validate_well_formed():
    inst = instance(large_site(0, 0, 0), common_site(1, 100, 0))
    assert validate_instance(inst).codes() == []
    assert require_valid(inst) is inst
    assert inst.large_ids == {0}
    assert inst.common_ids == {1}


def test_validate_empty():
    assert validate_instance(Instance.from_sites([])).codes() == [ViolationCode.EMPTY_INSTANCE]


def test_validate_duplicate_id():
    inst = instance(common_site(1, 0, 0), common_site(1, 50, 0))
    assert ViolationCode.DUPLICATE_ID in validate_instance(inst).codes()


def test_validate_capacity_below_own_waste():
    inst = instance(common_site(1, 0, 0, OrgType.Outpatient, q=20.0, capacity=10.0))
    assert validate_instance(inst).codes() == [ViolationCode.CAPACITY_BELOW_OWN_WASTE]


@pytest.mark.parametrize('site, code', [
    (CollectionSite(-1, 'x', GeoPoint(38.9, 121.6), OrgType.Clinic, 1.5), ViolationCode.NEGATIVE_ID),
    (CollectionSite(1, 'x', GeoPoint(38.9, 121.6), OrgType.Clinic, -1.0), ViolationCode.NEGATIVE_WASTE),
    (CollectionSite(1, 'x', GeoPoint(38.9, 121.6), OrgType.Clinic, 1.5, capacity_kg=0.0),
     ViolationCode.NON_POSITIVE_CAPACITY),
    (CollectionSite(1, 'x', GeoPoint(95.0, 121.6), OrgType.Clinic, 1.5), ViolationCode.INVALID_COORDINATE),
    (CollectionSite(1, 'x', GeoPoint(38.9, 121.6), OrgType.PrimaryHospitalOrAbove, 100.0),
     ViolationCode.BEDS_MISMATCH),
    (CollectionSite(1, 'x', GeoPoint(38.9, 121.6), OrgType.Clinic, 1.5, beds=10), ViolationCode.BEDS_MISMATCH),
])
def test_validate_site_codes(site, code):
    assert validate_instance(Instance.from_sites([site])).codes() == [code]


def test_validate_tier_sets():
    a, b = large_site(0, 0, 0), common_site(1, 10, 0)
    swapped = Instance((a, b), frozenset({1}), frozenset({0}))
    assert ViolationCode.TIER_MISMATCH in validate_instance(swapped).codes()
    ghost = Instance((a, b), frozenset({0, 5}), frozenset({1}))
    assert ViolationCode.UNKNOWN_ID in validate_instance(ghost).codes()


def test_require_valid_carries_violations():
    inst = instance(common_site(1, 0, 0), common_site(1, 50, 0))
    with pytest.raises(InvalidInputError) as info:
        require_valid(inst)
    assert ViolationCode.DUPLICATE_ID in info.value.violations.codes()
