from django import forms
from django.core.exceptions import ValidationError


class ImageRecordForm(forms.Form):
    id = forms.IntegerField()
    width = forms.IntegerField(min_value=1)
    height = forms.IntegerField(min_value=1)


class AnnotationRecordForm(forms.Form):
    image_id = forms.IntegerField()
    category_id = forms.IntegerField(min_value=0)
    rle = forms.JSONField(required=False)
    mask_file = forms.CharField(required=False, strip=False)
    score = forms.FloatField(required=False, min_value=0.0, max_value=1.0)

    def clean_rle(self):
        rle = self.cleaned_data.get('rle')
        if rle is None:
            return rle
        if not isinstance(rle, list) or not all(
            isinstance(count, int) and not isinstance(count, bool)
            and count >= 0
            for count in rle
        ):
            raise ValidationError(
                'RLE должен быть списком неотрицательных целых.'
            )
        return rle


def describe_errors(form: forms.Form) -> str:
    """Ошибки формы одной строкой."""
    return '; '.join(
        f'{field}: {" ".join(messages)}'
        for field, messages in form.errors.items()
    )
