from django.dispatch import Signal

post_run = Signal()

post_batch_run = Signal()
post_batch = Signal()

epoch_boundary = Signal()
