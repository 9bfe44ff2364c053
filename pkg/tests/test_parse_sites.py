import pytest

from medsite.utils.domain import DEFAULT_CAPACITY_KG, ModelParams, OrgType
from medsite.utils.errors import InvalidInputError
from medsite.utils.evaluate import OpsCoefficients
from medsite.utils.generate import load_frozen_instance
from medsite.utils.parser.parse_sites import (SITE_COLUMNS, load_coeffs_json, load_params_json, parse_sites_csv,
                                              sites_to_csv)
from medsite.utils.violation_list import ViolationCode

HEADER = ','.join(SITE_COLUMNS)


def test_parse_full_rows():
    text = '\n'.join([
        HEADER,
        '7,North Hospital,38.91,121.62,PrimaryHospitalOrAbove,300,120.0,1500',
        '3,Corner Clinic,38.912,121.621,Clinic,,1.5,800',
    ]) + '\n'
    inst = parse_sites_csv(text)
    assert inst.ids == [7, 3]
    assert inst.large_ids == frozenset({7})
    assert inst.common_ids == frozenset({3})
    clinic = inst.site(3)
    assert clinic.name == 'Corner Clinic'
    assert clinic.org_type is OrgType.Clinic
    assert clinic.beds is None
    assert clinic.capacity_kg == 800.0
    assert inst.site(7).beds == 300


def test_optional_columns_may_be_missing():
    text = 'id,name,lat,lon,org_type,beds\n1,A,38.9,121.6,PrimaryHospitalOrAbove,250\n2,B,38.9,121.61,Outpatient,\n'
    inst = parse_sites_csv(text)
    assert inst.site(1).q_kg_day == pytest.approx(100.0)
    assert inst.site(2).q_kg_day == 17.5
    assert inst.site(2).capacity_kg == DEFAULT_CAPACITY_KG


def test_org_type_spelling_is_lenient():
    text = 'id,name,lat,lon,org_type\n1,A,38.9,121.6,community_hospital\n2,B,38.9,121.6, clinic\n'
    inst = parse_sites_csv(text)
    assert inst.site(1).org_type is OrgType.CommunityHospital
    assert inst.site(2).org_type is OrgType.Clinic


def test_missing_column():
    with pytest.raises(InvalidInputError, match='org_type'):
        parse_sites_csv('id,name,lat,lon\n1,A,38.9,121.6\n')


def test_empty_text():
    with pytest.raises(InvalidInputError):
        parse_sites_csv('')


def test_header_only_is_an_empty_instance():
    with pytest.raises(InvalidInputError) as info:
        parse_sites_csv(HEADER + '\n')
    assert info.value.violations.has(ViolationCode.EMPTY_INSTANCE)


@pytest.mark.parametrize('row, needle', [
    ('x,A,38.9,121.6,Clinic,,,', 'id must be an integer'),
    ('1,A,north,121.6,Clinic,,,', 'lat must be a number'),
    ('1,A,38.9,inf,Clinic,,,', 'lon must be finite'),
    ('1,A,38.9,121.6,Pharmacy,,,', 'unknown org_type'),
    ('1,A,38.9,121.6,PrimaryHospitalOrAbove,,,', 'positive bed count'),
])
def test_bad_rows_name_their_line(row, needle):
    text = '\n'.join([HEADER, '0,Z,38.9,121.6,Clinic,,,', row]) + '\n'
    with pytest.raises(InvalidInputError) as info:
        parse_sites_csv(text)
    assert str(info.value).startswith('line 3: ')
    assert needle in str(info.value)


def test_invalid_instance_is_rejected():
    text = '\n'.join([HEADER, '1,A,38.9,121.6,Clinic,,,', '1,B,38.9,121.7,Clinic,,,']) + '\n'
    with pytest.raises(InvalidInputError) as info:
        parse_sites_csv(text)
    assert info.value.violations.has(ViolationCode.DUPLICATE_ID)


def test_csv_round_trip_of_frozen_instance():
    inst = load_frozen_instance()
    again = parse_sites_csv(sites_to_csv(inst))
    assert again == inst
    assert sites_to_csv(again) == sites_to_csv(inst)


def test_params_defaults_and_overrides():
    assert load_params_json('') == ModelParams()
    params = load_params_json('{"L_m": 800, "f_cny": 2500.5}')
    assert params.L_m == 800.0
    assert params.f_cny == 2500.5
    assert params.b_cny_kg == ModelParams().b_cny_kg


@pytest.mark.parametrize('text', [
    '{"L": 800}',
    '{"L_m": "800"}',
    '{"L_m": true}',
    '{"L_m": 0}',
    '{"a1_cny_kg": 5}',
    '[1, 2]',
    '{"L_m": ',
])
def test_bad_params(text):
    with pytest.raises(InvalidInputError):
        load_params_json(text)


def test_coeffs():
    assert load_coeffs_json('{}') == OpsCoefficients()
    assert load_coeffs_json('{"m0_cny": 80}').m0_cny == 80.0
    with pytest.raises(InvalidInputError):
        load_coeffs_json('{"tau0_min": -1}')
